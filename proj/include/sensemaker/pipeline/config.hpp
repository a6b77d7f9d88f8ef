#pragma once

#include "sensemaker/adversarial/suite.hpp"
#include "sensemaker/common/error.hpp"
#include "sensemaker/corpus/types.hpp"
#include "sensemaker/embedmetrics/score.hpp"
#include "sensemaker/llmroles/triplet.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sensemaker::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

enum class Stage { baselines, teacher, student, evaluator, mcq };

inline constexpr Stage all_stages[] = {Stage::baselines, Stage::teacher, Stage::student, Stage::evaluator,
                                       Stage::mcq};

inline char const * to_string(Stage s)
{
    switch (s) {
    case Stage::baselines: return "baselines";
    case Stage::teacher: return "teacher";
    case Stage::student: return "student";
    case Stage::evaluator: return "evaluator";
    case Stage::mcq: return "mcq";
    }
    return "";
}

inline std::optional<Stage> parse_stage(std::string const & s)
{
    for (auto st : all_stages) {
        if (s == to_string(st)) {
            return st;
        }
    }
    return std::nullopt;
}

struct ProviderConfig
{
    /// "simulated" or "openai" (any OpenAI-compatible endpoint).
    std::string kind = "simulated";
    std::string url = "https://api.openai.com/v1";
    int timeout_seconds = 120;
};

struct EmbeddingConfig
{
    /// "hashing" or "http".
    std::string kind = "hashing";
    std::size_t dim = 256;
    std::string url = "https://api.openai.com/v1";
    std::string model = "text-embedding-3-small";
    std::size_t batch_size = 64;
    embedmetrics::ScoringConfig scoring;
};

struct BaselineConfig
{
    std::string system_id = "baseline";
    std::string model = "gpt-4.1-nano-2025-04-14";
    std::size_t questions_per_section = 5;
    std::size_t span_tokens = 60;
    int max_retries = 3;
    /// Directory with <name>.v1.txt prompt overrides; empty for built-ins.
    std::string prompts_dir;
};

struct TeacherConfig
{
    std::vector<std::string> judge_models{"gpt-4.1-mini-2025-04-14"};
    std::vector<llmroles::PromptVariant> variants{llmroles::PromptVariant::original};
};

struct EvaluatorConfig
{
    /// Models run through the evaluator prompt, each as its own system.
    std::vector<std::string> models;
    /// Whether the baseline model also rates, under the baseline system id.
    bool include_baseline = true;
    std::set<adversarial::Transform> transforms;
    adversarial::SuiteOptions scopes;
};

struct McqConfig
{
    std::vector<corpus::McqMode> modes{corpus::McqMode::determine_statement, corpus::McqMode::determine_explanation};
    std::size_t max_options = 5;
    double unknowable_fraction = 0.2;
};

struct Config
{
    fs::path corpus_dir;
    fs::path out_dir = "out";
    fs::path cache_dir = ".sensemaker-cache";
    std::uint64_t seed = 0;
    ProviderConfig provider;
    EmbeddingConfig embedding;
    std::vector<Stage> stages{Stage::baselines, Stage::teacher, Stage::student, Stage::evaluator, Stage::mcq};
    BaselineConfig baselines;
    TeacherConfig teacher;
    EvaluatorConfig evaluator;
    McqConfig mcq;
    /// Question systems whose questions and reference answers are expert-made.
    std::set<std::string> expert_systems;

    [[nodiscard]] bool has_stage(Stage s) const
    {
        for (auto x : stages) {
            if (x == s) {
                return true;
            }
        }
        return false;
    }
};

namespace detail {

template <typename T>
T get(json const & obj, char const * key, T fallback, std::string const & where)
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return fallback;
    }
    try {
        return it->get<T>();
    } catch (json::exception const &) {
        throw ConfigError("config: '" + where + key + "' has the wrong type");
    }
}

inline json const & section(json const & root, char const * key)
{
    static json const empty = json::object();
    auto it = root.find(key);
    if (it == root.end() || it->is_null()) {
        return empty;
    }
    if (!it->is_object()) {
        throw ConfigError(std::string("config: '") + key + "' must be an object");
    }
    return *it;
}

inline adversarial::SwapScope parse_scope(std::string const & s)
{
    if (s == "corpus") return adversarial::SwapScope::corpus;
    if (s == "same_kind") return adversarial::SwapScope::same_kind;
    if (s == "different_kind") return adversarial::SwapScope::different_kind;
    throw ConfigError("config: unknown swap scope '" + s + "'");
}

inline fs::path resolve(fs::path const & base, fs::path const & p)
{
    if (p.empty() || p.is_absolute()) {
        return p;
    }
    return base / p;
}

} // namespace detail

/// Parses a config document. Relative paths are resolved against `base`.
inline Config parse_config(json const & root, fs::path const & base = {})
{
    if (!root.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    Config c;
    auto const corpus_dir = detail::get<std::string>(root, "corpus_dir", "", "");
    if (corpus_dir.empty()) {
        throw ConfigError("config: 'corpus_dir' is required");
    }
    c.corpus_dir = detail::resolve(base, corpus_dir);
    c.out_dir = detail::resolve(base, detail::get<std::string>(root, "out_dir", c.out_dir.string(), ""));
    c.cache_dir = detail::resolve(base, detail::get<std::string>(root, "cache_dir", c.cache_dir.string(), ""));
    c.seed = detail::get<std::uint64_t>(root, "seed", 0, "");

    if (root.contains("stages")) {
        c.stages.clear();
        for (auto const & s : detail::get<std::vector<std::string>>(root, "stages", {}, "")) {
            auto st = parse_stage(s);
            if (!st) {
                throw ConfigError("config: unknown stage '" + s + "'");
            }
            c.stages.push_back(*st);
        }
    }
    c.expert_systems = detail::get<std::set<std::string>>(root, "expert_systems", {}, "");

    auto const & p = detail::section(root, "provider");
    c.provider.kind = detail::get<std::string>(p, "kind", c.provider.kind, "provider.");
    c.provider.url = detail::get<std::string>(p, "url", c.provider.url, "provider.");
    c.provider.timeout_seconds = detail::get<int>(p, "timeout_seconds", c.provider.timeout_seconds, "provider.");
    if (c.provider.kind != "simulated" && c.provider.kind != "openai") {
        throw ConfigError("config: provider.kind must be 'simulated' or 'openai'");
    }

    auto const & e = detail::section(root, "embedding");
    c.embedding.kind = detail::get<std::string>(e, "kind", c.embedding.kind, "embedding.");
    c.embedding.dim = detail::get<std::size_t>(e, "dim", c.embedding.dim, "embedding.");
    c.embedding.url = detail::get<std::string>(e, "url", c.embedding.url, "embedding.");
    c.embedding.model = detail::get<std::string>(e, "model", c.embedding.model, "embedding.");
    c.embedding.batch_size = detail::get<std::size_t>(e, "batch_size", c.embedding.batch_size, "embedding.");
    c.embedding.scoring.window_tokens
        = detail::get<std::size_t>(e, "window_tokens", c.embedding.scoring.window_tokens, "embedding.");
    c.embedding.scoring.stride_tokens
        = detail::get<std::size_t>(e, "stride_tokens", c.embedding.scoring.stride_tokens, "embedding.");
    c.embedding.scoring.epsilon = detail::get<double>(e, "epsilon", c.embedding.scoring.epsilon, "embedding.");
    if (c.embedding.kind != "hashing" && c.embedding.kind != "http") {
        throw ConfigError("config: embedding.kind must be 'hashing' or 'http'");
    }
    if (c.embedding.scoring.window_tokens == 0 || c.embedding.scoring.stride_tokens == 0) {
        throw ConfigError("config: embedding window and stride must be positive");
    }
    if (!(c.embedding.scoring.epsilon > 0.0)) {
        throw ConfigError("config: embedding.epsilon must be positive");
    }

    auto const & b = detail::section(root, "baselines");
    c.baselines.system_id = detail::get<std::string>(b, "system_id", c.baselines.system_id, "baselines.");
    c.baselines.model = detail::get<std::string>(b, "model", c.baselines.model, "baselines.");
    c.baselines.questions_per_section
        = detail::get<std::size_t>(b, "questions_per_section", c.baselines.questions_per_section, "baselines.");
    c.baselines.span_tokens = detail::get<std::size_t>(b, "span_tokens", c.baselines.span_tokens, "baselines.");
    c.baselines.max_retries = detail::get<int>(b, "max_retries", c.baselines.max_retries, "baselines.");
    c.baselines.prompts_dir = detail::get<std::string>(b, "prompts_dir", "", "baselines.");
    if (!c.baselines.prompts_dir.empty()) {
        c.baselines.prompts_dir = detail::resolve(base, c.baselines.prompts_dir).string();
    }
    if (c.baselines.max_retries < 0) {
        throw ConfigError("config: baselines.max_retries must not be negative");
    }

    auto const & t = detail::section(root, "teacher");
    c.teacher.judge_models = detail::get<std::vector<std::string>>(t, "judge_models", c.teacher.judge_models, "teacher.");
    if (t.contains("variants")) {
        c.teacher.variants.clear();
        for (auto const & v : detail::get<std::vector<std::string>>(t, "variants", {}, "teacher.")) {
            auto pv = llmroles::parse_variant(v);
            if (!pv) {
                throw ConfigError("config: unknown prompt variant '" + v + "'");
            }
            c.teacher.variants.push_back(*pv);
        }
    }

    auto const & ev = detail::section(root, "evaluator");
    c.evaluator.models = detail::get<std::vector<std::string>>(ev, "models", {}, "evaluator.");
    c.evaluator.include_baseline = detail::get<bool>(ev, "include_baseline", true, "evaluator.");
    if (ev.contains("transforms")) {
        for (auto const & s : detail::get<std::vector<std::string>>(ev, "transforms", {}, "evaluator.")) {
            auto tr = adversarial::parse_transform(s);
            if (!tr) {
                throw ConfigError("config: unknown transform '" + s + "'");
            }
            c.evaluator.transforms.insert(*tr);
        }
    } else {
        c.evaluator.transforms.insert(std::begin(adversarial::all_transforms), std::end(adversarial::all_transforms));
    }
    c.evaluator.scopes.answers_scope
        = detail::parse_scope(detail::get<std::string>(ev, "answers_scope", "same_kind", "evaluator."));
    c.evaluator.scopes.material_scope
        = detail::parse_scope(detail::get<std::string>(ev, "material_scope", "same_kind", "evaluator."));
    c.evaluator.scopes.questions_scope
        = detail::parse_scope(detail::get<std::string>(ev, "questions_scope", "different_kind", "evaluator."));

    auto const & m = detail::section(root, "mcq");
    if (m.contains("modes")) {
        c.mcq.modes.clear();
        for (auto const & s : detail::get<std::vector<std::string>>(m, "modes", {}, "mcq.")) {
            auto mode = corpus::parse_mcq_mode(s);
            if (!mode) {
                throw ConfigError("config: unknown mcq mode '" + s + "'");
            }
            c.mcq.modes.push_back(*mode);
        }
    }
    c.mcq.max_options = detail::get<std::size_t>(m, "max_options", c.mcq.max_options, "mcq.");
    c.mcq.unknowable_fraction = detail::get<double>(m, "unknowable_fraction", c.mcq.unknowable_fraction, "mcq.");
    if (c.mcq.max_options < 2 || c.mcq.max_options > 26) {
        throw ConfigError("config: mcq.max_options must lie in [2, 26]");
    }
    if (!(c.mcq.unknowable_fraction >= 0.0 && c.mcq.unknowable_fraction <= 1.0)) {
        throw ConfigError("config: mcq.unknowable_fraction must lie in [0, 1]");
    }
    return c;
}

inline Config load_config(fs::path const & path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    json root = json::parse(in, nullptr, false);
    if (root.is_discarded()) {
        throw ConfigError("config file " + path.string() + " is not valid JSON");
    }
    return parse_config(root, path.parent_path());
}

} // namespace sensemaker::pipeline
