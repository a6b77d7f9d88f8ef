#include "sensemaker/corpus/io.hpp"
#include "sensemaker/corpus/mcq.hpp"
#include "sensemaker/corpus/questionnaire.hpp"
#include "sensemaker/llmroles/prompts.hpp"
#include "sensemaker/pipeline/config.hpp"
#include "sensemaker/pipeline/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace sensemaker;

int exit_code(Error::Category c)
{
    switch (c) {
    case Error::Category::config: return 2;
    case Error::Category::provider: return 3;
    case Error::Category::argument:
    case Error::Category::data: return 4;
    }
    return 1;
}

struct RunOptions
{
    std::string config;
    std::vector<std::string> stages;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string cache_dir;
    std::string provider_url;
    std::string model;
    bool quiet = false;
};

void add_run_options(CLI::App & cmd, RunOptions & o, bool with_stage)
{
    cmd.add_option("--config", o.config, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    if (with_stage) {
        cmd.add_option("--stage", o.stages, "Stages to run (baselines, teacher, student, evaluator, mcq)")
            ->delimiter(',');
    }
    cmd.add_option("--seed", o.seed, "Override the config seed");
    cmd.add_option("--out-dir", o.out_dir, "Override the output directory");
    cmd.add_option("--cache-dir", o.cache_dir, "Override the cache directory");
    cmd.add_option("--provider-url", o.provider_url, "Override the chat provider base URL");
    cmd.add_option("--model", o.model, "Override the baseline model");
    cmd.add_flag("--quiet,-q", o.quiet, "Do not print progress");
}

pipeline::Config resolve_config(RunOptions const & o)
{
    auto cfg = pipeline::load_config(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    if (!o.out_dir.empty()) {
        cfg.out_dir = o.out_dir;
    }
    if (!o.cache_dir.empty()) {
        cfg.cache_dir = o.cache_dir;
    }
    if (!o.provider_url.empty()) {
        cfg.provider.url = o.provider_url;
    }
    if (!o.model.empty()) {
        cfg.baselines.model = o.model;
    }
    return cfg;
}

/// Runs `stages`, or the configured stages when empty.
int run(RunOptions const & o, std::vector<pipeline::Stage> stages)
{
    auto const cfg = resolve_config(o);
    if (stages.empty()) {
        for (auto const & s : o.stages) {
            auto st = pipeline::parse_stage(s);
            if (!st) {
                throw ConfigError("unknown stage '" + s + "'");
            }
            stages.push_back(*st);
        }
    }
    if (stages.empty()) {
        stages = cfg.stages;
    }
    std::optional<std::string> key;
    if (char const * k = std::getenv("SENSEMAKER_API_KEY")) {
        key = k;
    }
    auto providers = pipeline::make_providers(cfg, key);
    auto log = [&](std::string const & line) {
        if (!o.quiet) {
            std::cerr << "sensemaker: " << line << '\n';
        }
    };
    auto const ws = pipeline::run_stages(cfg, stages, providers, log);
    pipeline::write_outputs(ws, cfg.out_dir);
    log("wrote " + std::to_string(ws.report.tables.size()) + " tables to " + cfg.out_dir.string());
    return 0;
}

/// Single-track command: the track's stage, preceded by the baselines when
/// the config enables them.
int run_track(RunOptions const & o, pipeline::Stage stage)
{
    auto const cfg = resolve_config(o);
    std::vector<pipeline::Stage> stages;
    if (cfg.has_stage(pipeline::Stage::baselines)) {
        stages.push_back(pipeline::Stage::baselines);
    }
    stages.push_back(stage);
    return run(o, stages);
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Quiz-based text comprehension evaluation harness"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto * cmd_run = app.add_subcommand("run", "Run all configured stages and write the report");
    add_run_options(*cmd_run, run_opts, true);

    RunOptions teacher_opts;
    auto * cmd_teacher = app.add_subcommand("score-teacher", "Score question sets (automatic and LLM-judge ranks)");
    add_run_options(*cmd_teacher, teacher_opts, false);

    RunOptions student_opts;
    auto * cmd_student = app.add_subcommand("score-student", "Score answers against reference answers");
    add_run_options(*cmd_student, student_opts, false);

    RunOptions evaluator_opts;
    auto * cmd_evaluator = app.add_subcommand("score-evaluator", "Evaluate graders with the adversarial suite");
    add_run_options(*cmd_evaluator, evaluator_opts, false);

    std::string mcq_in;
    std::string mcq_out;
    std::string mcq_mode = "determine_statement";
    std::uint64_t mcq_seed = 0;
    std::size_t mcq_max_options = 5;
    double mcq_unknowable = 0.2;
    auto * cmd_mcq = app.add_subcommand("build-mcq", "Build multiple-choice items from fact-check records");
    cmd_mcq->add_option("--factcheck", mcq_in, "factcheck.jsonl")->required()->check(CLI::ExistingFile);
    cmd_mcq->add_option("--out", mcq_out, "Output JSONL")->required();
    cmd_mcq->add_option("--mode", mcq_mode, "statement_w_explanation, determine_statement or determine_explanation");
    cmd_mcq->add_option("--seed", mcq_seed, "Seed");
    cmd_mcq->add_option("--max-options", mcq_max_options, "Options per item");
    cmd_mcq->add_option("--unknowable-fraction", mcq_unknowable, "Fraction of UNKNOWABLE items");

    std::string qa_in;
    std::string qa_out;
    auto * cmd_questionnaire = app.add_subcommand("questionnaire", "Export a manual evaluation questionnaire");
    cmd_questionnaire->add_option("--pairs", qa_in, "JSONL with question and answer fields")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_questionnaire->add_option("--out", qa_out, "Output markdown file")->required();

    std::string prompts_out;
    auto * cmd_prompts = app.add_subcommand("dump-prompts", "Write the built-in prompt templates");
    cmd_prompts->add_option("--out", prompts_out, "Directory")->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const & e) {
        int const code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cmd_run) {
            return run(run_opts, {});
        }
        if (*cmd_teacher) {
            return run_track(teacher_opts, pipeline::Stage::teacher);
        }
        if (*cmd_student) {
            return run_track(student_opts, pipeline::Stage::student);
        }
        if (*cmd_evaluator) {
            return run_track(evaluator_opts, pipeline::Stage::evaluator);
        }
        if (*cmd_mcq) {
            auto mode = corpus::parse_mcq_mode(mcq_mode);
            if (!mode) {
                throw ConfigError("unknown mode '" + mcq_mode + "'");
            }
            corpus::McqOptions opts;
            opts.seed = mcq_seed;
            opts.max_options = mcq_max_options;
            opts.unknowable_fraction = mcq_unknowable;
            std::vector<std::string> warnings;
            auto const items = corpus::build_mcq_items(corpus::parse_factcheck(mcq_in), *mode, opts, &warnings);
            for (auto const & w : warnings) {
                std::cerr << "sensemaker: " << w << '\n';
            }
            std::vector<nlohmann::json> lines;
            for (auto const & item : items) {
                lines.push_back(corpus::to_json(item));
            }
            jsonl::write(mcq_out, lines);
            return 0;
        }
        if (*cmd_questionnaire) {
            std::vector<std::pair<std::string, std::string>> pairs;
            for (auto const & line : jsonl::read(qa_in)) {
                jsonl::FieldReader f(qa_in, line);
                pairs.emplace_back(f.non_empty_string("question"), f.non_empty_string("answer"));
            }
            std::ofstream out(qa_out, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw DataError("cannot write " + qa_out);
            }
            out << corpus::export_questionnaire(pairs);
            return 0;
        }
        if (*cmd_prompts) {
            llmroles::PromptSet{}.save(prompts_out);
            return 0;
        }
    } catch (Error const & e) {
        std::cerr << "sensemaker: error: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (std::exception const & e) {
        std::cerr << "sensemaker: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
