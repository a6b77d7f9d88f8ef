#include "sensemaker/pipeline/config.hpp"
#include "sensemaker/pipeline/run.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <chrono>

using namespace sensemaker;
using namespace sensemaker::pipeline;
using namespace testing_support;
using nlohmann::json;

namespace {

Config toy_config(std::string const & tag)
{
    auto cfg = load_config(toy_dir() / "config.json");
    auto const dir = scratch_dir("pipeline_" + tag);
    cfg.out_dir = dir / "out";
    cfg.cache_dir = dir / "cache";
    return cfg;
}

Workspace run_all(Config const & cfg)
{
    auto providers = make_providers(cfg, std::nullopt);
    return run_stages(cfg, cfg.stages, providers);
}

std::map<std::string, std::string> snapshot(fs::path const & dir)
{
    std::map<std::string, std::string> out;
    for (auto const & e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), dir).string()] = read_file(e.path());
        }
    }
    return out;
}

json toy_json()
{
    std::ifstream in(toy_dir() / "config.json");
    return json::parse(in);
}

} // namespace

TEST(Config, ToyConfigParses)
{
    auto const cfg = load_config(toy_dir() / "config.json");
    EXPECT_EQ(cfg.corpus_dir, toy_dir() / ".");
    EXPECT_EQ(cfg.stages.size(), 5u);
    EXPECT_EQ(cfg.teacher.judge_models.size(), 2u);
    EXPECT_EQ(cfg.evaluator.transforms.size(), 7u);
    EXPECT_EQ(cfg.baselines.questions_per_section, 3u);
    EXPECT_TRUE(cfg.expert_systems.count("experts"));
}

TEST(Config, Errors)
{
    auto expect_config_error = [](json j) {
        EXPECT_THROW(parse_config(j, toy_dir()), ConfigError) << j.dump();
    };
    auto j = toy_json();
    j["stages"] = {"teacher", "grading"};
    expect_config_error(j);
    j = toy_json();
    j["evaluator"]["transforms"] = {"answers_reversed"};
    expect_config_error(j);
    j = toy_json();
    j["seed"] = "seven";
    expect_config_error(j);
    j = toy_json();
    j["teacher"]["variants"] = {"sideways"};
    expect_config_error(j);
    j = toy_json();
    j["evaluator"]["answers_scope"] = "galaxy";
    expect_config_error(j);
    j = toy_json();
    j["mcq"]["modes"] = {"guess"};
    expect_config_error(j);
    j = toy_json();
    j.erase("corpus_dir");
    expect_config_error(j);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);

    auto const dir = scratch_dir("config_bad_json");
    write_file(dir / "c.json", "{ not json");
    EXPECT_THROW(load_config(dir / "c.json"), ConfigError);
}

TEST(Providers, LiveProviderNeedsKey)
{
    auto cfg = toy_config("keys");
    cfg.provider.kind = "openai";
    EXPECT_THROW(make_providers(cfg, std::nullopt), ConfigError);
    EXPECT_THROW(make_providers(cfg, std::string()), ConfigError);
    EXPECT_NO_THROW(make_providers(cfg, std::string("k")));
    cfg.provider.kind = "simulated";
    cfg.embedding.kind = "http";
    EXPECT_THROW(make_providers(cfg, std::nullopt), ConfigError);
}

TEST(Pipeline, ToyRunProducesAllTables)
{
    auto const cfg = toy_config("tables");
    auto const start = std::chrono::steady_clock::now();
    auto const ws = run_all(cfg);
    auto const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(seconds, 60.0);

    for (auto const * name :
         {"teacher_auto_scores", "teacher_auto_ranks", "teacher_auto_ranks_overall", "teacher_auto_ranks_by_kind",
          "teacher_llm_ranks", "teacher_llm_ranks_overall", "student_rouge", "student_rouge_by_kind",
          "student_rouge_by_origin", "student_correlation_expert", "evaluator_mean_by_category",
          "evaluator_gold_vs_student_by_kind", "evaluator_agreement", "evaluator_class_accuracy",
          "evaluator_class_precision", "answering_system", "mcq_accuracy", "mcq_vocab_split",
          "mcq_verdict_phrase"}) {
        auto const * t = ws.report.find(name);
        ASSERT_NE(t, nullptr) << name;
        EXPECT_FALSE(t->rows.empty()) << name;
    }
    EXPECT_TRUE(std::is_sorted(ws.report.tables.begin(), ws.report.tables.end(),
                               [](auto const & a, auto const & b) { return a.spec.name < b.spec.name; }));

    // every adversarial category shows up in the evaluator table
    auto const * by_cat = ws.report.find("evaluator_mean_by_category");
    std::set<std::string> categories;
    for (auto const & r : by_cat->rows) {
        categories.insert(r.keys.back());
    }
    for (auto t : adversarial::all_transforms) {
        EXPECT_TRUE(categories.count(adversarial::category_label(t))) << adversarial::category_label(t);
    }
    EXPECT_TRUE(categories.count(category_golden));
    EXPECT_TRUE(categories.count(category_student));
}

TEST(Pipeline, AutomaticRanksArePermutationsPerDocument)
{
    auto const ws = run_all(toy_config("ranks"));
    std::map<std::pair<std::string, std::string>, std::vector<int>> by_doc;
    std::set<std::string> systems;
    for (auto const & r : ws.report.records.at("teacher_auto_ranks")) {
        by_doc[{r["document"], r["quantity"]}].push_back(r["rank"]);
        systems.insert(r["system"].get<std::string>());
    }
    ASSERT_EQ(systems.size(), 4u);
    ASSERT_EQ(by_doc.size(), 18u);
    for (auto & [key, ranks] : by_doc) {
        std::sort(ranks.begin(), ranks.end());
        EXPECT_EQ(ranks, (std::vector<int>{1, 2, 3, 4})) << key.first;
    }
    // team-a did not submit forest_claim and must rank last there
    for (auto const & r : ws.report.records.at("teacher_auto_ranks")) {
        if (!r["submitted"].get<bool>()) {
            EXPECT_EQ(r["system"], "team-a");
            EXPECT_EQ(r["rank"], 1);
        }
    }
}

TEST(Pipeline, ByteReproducibleWithColdAndWarmCaches)
{
    auto a = toy_config("repro_a");
    auto b = toy_config("repro_b");
    write_outputs(run_all(a), a.out_dir);
    write_outputs(run_all(b), b.out_dir);
    auto const first = snapshot(a.out_dir);
    EXPECT_EQ(first, snapshot(b.out_dir));
    EXPECT_TRUE(first.count("report.md"));
    EXPECT_TRUE(first.count("tables/answering_system.csv"));
    EXPECT_TRUE(first.count("intermediate/adversarial_items.jsonl"));

    // warm cache, and a stale file in the output directory gets cleared
    write_file(a.out_dir / "tables" / "stale.csv", "x");
    write_outputs(run_all(a), a.out_dir);
    EXPECT_EQ(snapshot(a.out_dir), first);

    // persisted records reproduce the tables
    auto const back = report::read_report(a.out_dir);
    for (auto const & t : back.tables) {
        EXPECT_EQ(report::tabulate(t.spec, back.records.at(t.spec.source)), t) << t.spec.name;
    }
}

TEST(Pipeline, SeedChangesOutput)
{
    auto a = toy_config("seed_a");
    auto b = toy_config("seed_b");
    b.seed = a.seed + 1;
    auto const wa = run_all(a);
    auto const wb = run_all(b);
    EXPECT_NE(wa.intermediates.at("adversarial_items"), wb.intermediates.at("adversarial_items"));
}

TEST(Pipeline, MissingCorpusIsDataError)
{
    auto cfg = toy_config("errors");
    cfg.corpus_dir = "/nonexistent/corpus";
    auto providers = make_providers(cfg, std::nullopt);
    EXPECT_THROW(run_stages(cfg, {Stage::student}, providers), DataError);
}

TEST(Pipeline, SingleStageRun)
{
    auto cfg = toy_config("single");
    auto providers = make_providers(cfg, std::nullopt);
    auto const ws = run_stages(cfg, {Stage::student}, providers);
    EXPECT_NE(ws.report.find("student_rouge"), nullptr);
    EXPECT_EQ(ws.report.find("teacher_auto_ranks"), nullptr);
    EXPECT_EQ(ws.report.find("mcq_accuracy"), nullptr);
}
