#pragma once

#include "sensemaker/adversarial/suite.hpp"
#include "sensemaker/common/error.hpp"
#include "sensemaker/common/jsonl.hpp"
#include "sensemaker/corpus/io.hpp"
#include "sensemaker/corpus/mcq.hpp"
#include "sensemaker/embedmetrics/http_embedder.hpp"
#include "sensemaker/embedmetrics/provider.hpp"
#include "sensemaker/embedmetrics/ranks.hpp"
#include "sensemaker/embedmetrics/score.hpp"
#include "sensemaker/lexmetrics/agreement.hpp"
#include "sensemaker/lexmetrics/overlap.hpp"
#include "sensemaker/llmroles/baselines.hpp"
#include "sensemaker/llmroles/http_chat.hpp"
#include "sensemaker/llmroles/simulated.hpp"
#include "sensemaker/llmroles/triplet.hpp"
#include "sensemaker/pipeline/config.hpp"
#include "sensemaker/report/analysis.hpp"
#include "sensemaker/report/render.hpp"
#include "sensemaker/report/table.hpp"

#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sensemaker::pipeline {

using report::TableSpec;

/// Answer source id of reference answers shipped with a question set.
inline constexpr char const * reference_source = "reference";

inline constexpr char const * category_golden = "golden answer";
inline constexpr char const * category_teacher_reference = "teacher reference";
inline constexpr char const * category_student = "student answer";

struct Providers
{
    std::shared_ptr<llmroles::ChatProvider> chat;
    std::shared_ptr<embedmetrics::EmbeddingProvider> embed;
};

/// Builds cached providers for a config. Live providers need an API key.
inline Providers make_providers(Config const & cfg, std::optional<std::string> const & api_key)
{
    Providers p;
    std::shared_ptr<llmroles::ChatProvider> chat;
    if (cfg.provider.kind == "simulated") {
        chat = std::make_shared<llmroles::SimulatedChatProvider>();
    } else {
        if (!api_key || api_key->empty()) {
            throw ConfigError("provider '" + cfg.provider.kind + "' needs an API key in SENSEMAKER_API_KEY");
        }
        chat = std::make_shared<llmroles::HttpChatProvider>(cfg.provider.url, *api_key, cfg.provider.timeout_seconds);
    }
    p.chat = std::make_shared<llmroles::CachingChatProvider>(chat, cfg.cache_dir / "chat");

    std::shared_ptr<embedmetrics::EmbeddingProvider> embed;
    if (cfg.embedding.kind == "hashing") {
        embed = std::make_shared<embedmetrics::HashingEmbedder>(cfg.embedding.dim);
    } else {
        if (!api_key || api_key->empty()) {
            throw ConfigError("embedding provider 'http' needs an API key in SENSEMAKER_API_KEY");
        }
        embed = std::make_shared<embedmetrics::HttpEmbedder>(cfg.embedding.url, cfg.embedding.model, *api_key,
                                                             cfg.embedding.batch_size);
    }
    p.embed = std::make_shared<embedmetrics::CachingEmbedder>(embed, cfg.cache_dir / "embeddings");
    return p;
}

/// State shared by the stages of one run.
struct Workspace
{
    corpus::Corpus corpus;
    report::RunReport report;
    /// Intermediate artifacts, written to intermediate/<name>.jsonl.
    std::map<std::string, std::vector<json>> intermediates;
    std::function<void(std::string const &)> log = [](std::string const &) {};
};

namespace detail {

inline std::string document_id(corpus::SectionRef const & ref)
{
    return ref.str();
}

inline std::string item_key(corpus::SectionRef const & ref, std::string const & qsys, std::size_t index,
                            std::string const & source)
{
    return ref.str() + "/" + qsys + "/" + std::to_string(index) + "/" + source;
}

inline llmroles::RoleConfig role_config(Config const & cfg)
{
    llmroles::RoleConfig r;
    r.system_id = cfg.baselines.system_id;
    r.model = cfg.baselines.model;
    r.max_retries = cfg.baselines.max_retries;
    if (!cfg.baselines.prompts_dir.empty()) {
        if (!fs::is_directory(cfg.baselines.prompts_dir)) {
            throw ConfigError("prompts directory not found: " + cfg.baselines.prompts_dir);
        }
        r.prompts = llmroles::PromptSet::load(cfg.baselines.prompts_dir);
    }
    return r;
}

inline json optional_number(std::optional<double> v)
{
    return v ? json(*v) : json(nullptr);
}

inline std::string origin_of(Config const & cfg, std::string const & question_system)
{
    return cfg.expert_systems.count(question_system) ? "expert" : "teacher";
}

inline TableSpec spec(std::string name, std::string title, std::string source, std::vector<std::string> keys,
                      std::string value, json filter = json::object(), std::string statistic = "mean")
{
    return {std::move(name), std::move(title), std::move(source), std::move(keys), std::move(value),
            std::move(statistic), std::move(filter)};
}

} // namespace detail

// --- baselines --------------------------------------------------------------

/// Generates baseline question sets (with reference answers) for every
/// section and baseline answers to every question set, skipping those the
/// corpus already has.
inline void run_baselines(Workspace & ws, Config const & cfg, Providers & providers)
{
    auto role = detail::role_config(cfg);
    auto & c = ws.corpus;
    std::vector<json> questions_out;
    std::vector<json> answers_out;
    std::size_t generated = 0;
    for (auto const & ref : c.section_refs()) {
        if (c.find_question_set(ref, role.system_id)) {
            continue;
        }
        auto result = llmroles::teacher_baseline(ref, *c.find_section(ref), cfg.baselines.questions_per_section,
                                                 cfg.baselines.span_tokens, *providers.chat, role);
        for (auto & w : result.warnings) {
            ws.report.notes.push_back("baselines: " + w);
        }
        if (result.value.questions.empty()) {
            continue;
        }
        questions_out.push_back(corpus::to_json(result.value));
        c.question_sets.push_back(std::move(result.value));
        ++generated;
    }
    ws.log("baselines: generated " + std::to_string(generated) + " question sets");

    std::size_t answered = 0;
    auto const question_sets = c.question_sets;
    for (auto const & qs : question_sets) {
        bool exists = false;
        for (auto const & as : c.answer_sets) {
            exists = exists
                     || (as.system_id == role.system_id && as.section_ref == qs.section_ref
                         && as.question_system_id == qs.system_id);
        }
        if (exists || qs.questions.empty()) {
            continue;
        }
        auto result = llmroles::student_baseline(*c.find_section(qs.section_ref), qs, *providers.chat, role);
        for (auto & w : result.warnings) {
            ws.report.notes.push_back("baselines: " + w);
        }
        answers_out.push_back(corpus::to_json(result.value));
        c.answer_sets.push_back(std::move(result.value));
        ++answered;
    }
    ws.log("baselines: answered " + std::to_string(answered) + " question sets");
    ws.intermediates["baseline_questions"] = std::move(questions_out);
    ws.intermediates["baseline_answers"] = std::move(answers_out);
}

// --- teacher ----------------------------------------------------------------

inline void score_teacher(Workspace & ws, Config const & cfg, Providers & providers)
{
    auto const & c = ws.corpus;
    std::set<std::string> systems;
    for (auto const & qs : c.question_sets) {
        systems.insert(qs.system_id);
    }
    auto & score_records = ws.report.records["teacher_scores"];
    auto & rank_records = ws.report.records["teacher_auto_ranks"];
    auto & llm_records = ws.report.records["teacher_llm_ranks"];

    std::map<std::string, std::string> kind_of;
    std::vector<std::string> documents;
    for (auto const & ref : c.section_refs()) {
        kind_of[detail::document_id(ref)] = ref.kind;
        documents.push_back(detail::document_id(ref));
    }

    embedmetrics::ScoreTable scores;
    for (auto const & qs : c.question_sets) {
        auto const doc = detail::document_id(qs.section_ref);
        std::vector<std::string> questions;
        for (auto const & q : qs.questions) {
            questions.push_back(q.question);
        }
        auto const s = embedmetrics::score_question_set(c.find_section(qs.section_ref)->text, questions,
                                                        *providers.embed, cfg.embedding.scoring,
                                                        qs.system_id + " on " + doc);
        scores[qs.system_id][doc] = s;
        for (auto q : embedmetrics::all_quantities) {
            score_records.push_back({{"system", qs.system_id},
                                     {"document", doc},
                                     {"kind", qs.section_ref.kind},
                                     {"quantity", embedmetrics::to_string(q)},
                                     {"value", embedmetrics::value_of(s, q)}});
        }
    }
    ws.log("teacher: scored " + std::to_string(c.question_sets.size()) + " question sets");

    if (systems.size() >= 2) {
        auto const agg = embedmetrics::aggregate_ranks(scores, documents, cfg.seed);
        for (auto const & dr : agg.per_document) {
            for (auto const & [system, ranks] : dr.ranks) {
                for (std::size_t qi = 0; qi < 3; ++qi) {
                    rank_records.push_back({{"document", dr.document},
                                            {"kind", kind_of[dr.document]},
                                            {"system", system},
                                            {"submitted", scores[system].count(dr.document) == 1},
                                            {"quantity", embedmetrics::to_string(embedmetrics::all_quantities[qi])},
                                            {"rank", ranks[qi]}});
                }
            }
        }
    } else {
        ws.report.notes.push_back("teacher: automatic ranking needs at least two question systems");
    }

    auto role = detail::role_config(cfg);
    std::vector<json> judgments;
    for (auto const & judge : cfg.teacher.judge_models) {
        role.model = judge;
        for (auto const variant : cfg.teacher.variants) {
            for (auto const & ref : c.section_refs()) {
                std::vector<std::string> present;
                for (auto const & s : systems) {
                    if (c.find_question_set(ref, s)) {
                        present.push_back(s);
                    }
                }
                auto const doc = detail::document_id(ref);
                for (auto const & triplet : llmroles::enumerate_triplets(present)) {
                    std::array<corpus::QuestionSet const *, 3> sets{c.find_question_set(ref, triplet[0]),
                                                                     c.find_question_set(ref, triplet[1]),
                                                                     c.find_question_set(ref, triplet[2])};
                    auto const j = llmroles::rank_triplet(doc, c.find_section(ref)->text, sets, variant, cfg.seed,
                                                          *providers.chat, role);
                    json per_category = json::array();
                    for (std::size_t ci = 0; ci < 4; ++ci) {
                        auto const & cj = j.per_category[ci];
                        per_category.push_back({{"category", llmroles::to_string(llmroles::all_categories[ci])},
                                                {"valid", cj.valid},
                                                {"best", cj.best},
                                                {"worst", cj.worst}});
                        if (!cj.valid) {
                            continue;
                        }
                        for (auto const & id : j.set_ids) {
                            int const rank = id == cj.best ? 3 : id == cj.worst ? 1 : 2;
                            llm_records.push_back({{"judge_model", judge},
                                                   {"variant", llmroles::to_string(variant)},
                                                   {"document", doc},
                                                   {"kind", ref.kind},
                                                   {"triplet", join({triplet[0], triplet[1], triplet[2]}, ",")},
                                                   {"category", llmroles::to_string(llmroles::all_categories[ci])},
                                                   {"system", id},
                                                   {"rank", rank}});
                        }
                    }
                    judgments.push_back({{"judge_model", judge},
                                         {"variant", llmroles::to_string(variant)},
                                         {"document", doc},
                                         {"set_ids", j.set_ids},
                                         {"categories", std::move(per_category)},
                                         {"reply", j.reply}});
                }
            }
        }
    }
    ws.log("teacher: " + std::to_string(judgments.size()) + " triplet judgments");
    ws.intermediates["teacher_judgments"] = std::move(judgments);

    auto & r = ws.report;
    report::add_table(r, detail::spec("teacher_auto_scores", "Teacher: automatic scores by system", "teacher_scores",
                                      {"system", "quantity"}, "value"));
    report::add_table(r, detail::spec("teacher_auto_ranks", "Teacher: average rank by automatic metric",
                                      "teacher_auto_ranks", {"system", "quantity"}, "rank"));
    report::add_table(r, detail::spec("teacher_auto_ranks_overall",
                                      "Teacher: average rank over all automatic metrics", "teacher_auto_ranks",
                                      {"system"}, "rank"));
    report::add_table(r, detail::spec("teacher_auto_ranks_by_kind", "Teacher: average automatic rank by material kind",
                                      "teacher_auto_ranks", {"kind", "system"}, "rank"));
    report::add_table(r, detail::spec("teacher_llm_ranks", "Teacher: average LLM-judge rank by category",
                                      "teacher_llm_ranks", {"judge_model", "variant", "system", "category"}, "rank"));
    report::add_table(r, detail::spec("teacher_llm_ranks_overall", "Teacher: average LLM-judge rank over categories",
                                      "teacher_llm_ranks", {"judge_model", "variant", "system"}, "rank"));
}

// --- student ----------------------------------------------------------------

inline void score_student(Workspace & ws, Config const & cfg)
{
    auto const & c = ws.corpus;
    auto & records = ws.report.records["student_rouge"];
    auto & pairs = ws.report.records["student_pairs"];
    // item -> student -> recall, for correlations on expert questions
    std::map<std::string, std::map<std::string, double>> expert_scores;
    for (auto const & as : c.answer_sets) {
        auto const * qs = c.find_question_set(as.section_ref, as.question_system_id);
        for (std::size_t i = 0; i < qs->questions.size(); ++i) {
            auto const & q = qs->questions[i];
            if (!q.reference_answer || lexmetrics::tokenize(*q.reference_answer).empty()) {
                continue;
            }
            double const recall = lexmetrics::rouge_l_recall(*q.reference_answer, as.answers[i].value_or(""));
            auto const origin = detail::origin_of(cfg, qs->system_id);
            auto const item = detail::item_key(as.section_ref, qs->system_id, i, reference_source);
            records.push_back({{"student", as.system_id},
                               {"question_system", qs->system_id},
                               {"kind", as.section_ref.kind},
                               {"document", detail::document_id(as.section_ref)},
                               {"question_index", i},
                               {"origin", origin},
                               {"answered", as.answers[i].has_value()},
                               {"rouge_l_recall", recall}});
            if (origin == "expert") {
                expert_scores[item][as.system_id] = recall;
            }
        }
    }
    for (auto const & [item, by_student] : expert_scores) {
        for (auto a = by_student.begin(); a != by_student.end(); ++a) {
            for (auto b = std::next(a); b != by_student.end(); ++b) {
                pairs.push_back({{"item", item},
                                 {"system_a", a->first},
                                 {"system_b", b->first},
                                 {"x", a->second},
                                 {"y", b->second}});
            }
        }
    }
    ws.log("student: " + std::to_string(records.size()) + " scored answers");

    auto & r = ws.report;
    report::add_table(r, detail::spec("student_rouge", "Student: ROUGE-L recall by system", "student_rouge",
                                      {"student"}, "rouge_l_recall"));
    report::add_table(r, detail::spec("student_rouge_by_kind", "Student: ROUGE-L recall by material kind",
                                      "student_rouge", {"student", "kind"}, "rouge_l_recall"));
    report::add_table(r, detail::spec("student_rouge_by_origin", "Student: ROUGE-L recall by question origin",
                                      "student_rouge", {"student", "origin"}, "rouge_l_recall"));
    report::add_table(r, detail::spec("student_correlation_expert",
                                      "Student: Pearson correlation of ROUGE-L recall on expert questions",
                                      "student_pairs", {"system_a", "system_b"}, "x,y", json::object(), "pearson"));
}

// --- evaluator --------------------------------------------------------------

struct EvalItem
{
    std::string id;
    adversarial::BaseItem base;
    std::string transform;
    std::string category;
    std::string material;
    std::string question;
    std::string answer;
    std::optional<std::string> reference;
};

namespace detail {

inline std::vector<EvalItem> genuine_items(corpus::Corpus const & c, Config const & cfg,
                                           std::vector<adversarial::BaseItem> & student_items)
{
    std::vector<EvalItem> out;
    for (auto const & qs : c.question_sets) {
        auto const & material = c.find_section(qs.section_ref)->text;
        for (std::size_t i = 0; i < qs.questions.size(); ++i) {
            auto const & q = qs.questions[i];
            if (!q.reference_answer || trim(*q.reference_answer).empty()) {
                continue;
            }
            adversarial::BaseItem b{item_key(qs.section_ref, qs.system_id, i, reference_source),
                                    qs.section_ref,
                                    qs.system_id,
                                    i,
                                    reference_source,
                                    material,
                                    q.question,
                                    *q.reference_answer};
            out.push_back({b.id, b, "",
                           cfg.expert_systems.count(qs.system_id) ? category_golden : category_teacher_reference,
                           material, q.question, *q.reference_answer, q.reference_answer});
        }
    }
    for (auto const & as : c.answer_sets) {
        auto const * qs = c.find_question_set(as.section_ref, as.question_system_id);
        auto const & material = c.find_section(as.section_ref)->text;
        for (std::size_t i = 0; i < as.answers.size(); ++i) {
            if (!as.answers[i] || trim(*as.answers[i]).empty()) {
                continue;
            }
            adversarial::BaseItem b{item_key(as.section_ref, qs->system_id, i, as.system_id),
                                    as.section_ref,
                                    qs->system_id,
                                    i,
                                    as.system_id,
                                    material,
                                    qs->questions[i].question,
                                    *as.answers[i]};
            student_items.push_back(b);
            out.push_back({b.id, b, "", category_student, material, b.question, b.answer,
                           qs->questions[i].reference_answer});
        }
    }
    return out;
}

inline std::optional<double> rouge_or_null(std::optional<std::string> const & reference, std::string const & answer)
{
    if (!reference || lexmetrics::tokenize(*reference).empty()) {
        return std::nullopt;
    }
    return lexmetrics::rouge_l_recall(*reference, answer);
}

inline json class_or_null(std::optional<double> score)
{
    if (!score) {
        return nullptr;
    }
    return lexmetrics::to_int(lexmetrics::quantize_class(*score));
}

} // namespace detail

inline void score_evaluator(Workspace & ws, Config const & cfg, Providers & providers)
{
    auto const & c = ws.corpus;
    std::vector<adversarial::BaseItem> student_items;
    auto items = detail::genuine_items(c, cfg, student_items);
    std::size_t const genuine = items.size();

    if (!cfg.evaluator.transforms.empty()) {
        if (student_items.size() < 2) {
            ws.report.notes.push_back("evaluator: adversarial suite skipped, fewer than two student answers");
        } else {
            std::vector<std::string> texts;
            for (auto const & ref : c.section_refs()) {
                texts.push_back(c.find_section(ref)->text);
            }
            auto const vocab = adversarial::build_vocabulary(texts);
            auto const suite = adversarial::build_adversarial_suite(student_items, cfg.evaluator.transforms, vocab,
                                                                    cfg.seed, cfg.evaluator.scopes);
            std::map<std::string, std::optional<std::string>> reference_of;
            for (std::size_t i = 0; i < genuine; ++i) {
                reference_of[items[i].id] = items[i].reference;
            }
            std::vector<json> suite_out;
            for (auto const & a : suite) {
                auto const t = adversarial::to_string(a.transform);
                items.push_back({a.base.id + "~" + t, a.base, t, adversarial::category_label(a.transform), a.material,
                                 a.question, a.answer, reference_of[a.base.id]});
                suite_out.push_back(adversarial::to_json(a));
            }
            ws.intermediates["adversarial_items"] = std::move(suite_out);
        }
    }

    std::vector<std::pair<std::string, llmroles::RoleConfig>> evaluators;
    auto base_role = detail::role_config(cfg);
    if (cfg.evaluator.include_baseline) {
        evaluators.emplace_back(base_role.system_id, base_role);
    }
    for (auto const & m : cfg.evaluator.models) {
        auto role = base_role;
        role.system_id = m;
        role.model = m;
        evaluators.emplace_back(m, role);
    }

    // (item id, evaluator) -> rescued rating
    std::map<std::string, std::map<std::string, std::optional<double>>> ratings;
    std::map<std::string, EvalItem const *> by_id;
    std::vector<json> items_out;
    for (auto const & it : items) {
        by_id[it.id] = &it;
        items_out.push_back({{"item_id", it.id},
                             {"kind", it.base.section_ref.kind},
                             {"section_id", it.base.section_ref.section_id},
                             {"question_system_id", it.base.question_system_id},
                             {"question_index", it.base.question_index},
                             {"answer_source_id", it.base.answer_source_id},
                             {"transform", it.transform},
                             {"category", it.category},
                             {"question", it.question},
                             {"answer", it.answer}});
    }
    ws.intermediates["evaluation_items"] = std::move(items_out);

    auto & rating_records = ws.report.records["evaluator_ratings"];
    auto add_rating = [&](std::string const & evaluator, EvalItem const & it, std::optional<double> raw) {
        std::optional<double> rescued;
        if (raw) {
            if (auto r = adversarial::rescue_rating(*raw)) {
                rescued = r->value;
            }
        }
        ratings[it.id][evaluator] = rescued;
        auto const rouge = detail::rouge_or_null(it.reference, it.answer);
        std::optional<double> const rouge100 = rouge ? std::optional<double>(*rouge * 100.0) : std::nullopt;
        rating_records.push_back({{"evaluator", evaluator},
                                  {"item_id", it.id},
                                  {"kind", it.base.section_ref.kind},
                                  {"question_system_id", it.base.question_system_id},
                                  {"answer_source_id", it.base.answer_source_id},
                                  {"origin", detail::origin_of(cfg, it.base.question_system_id)},
                                  {"transform", it.transform},
                                  {"category", it.category},
                                  {"raw", detail::optional_number(raw)},
                                  {"rating", detail::optional_number(rescued)},
                                  {"rouge_l_recall", detail::optional_number(rouge)},
                                  {"rouge_class", detail::class_or_null(rouge100)},
                                  {"predicted_class", detail::class_or_null(rescued)}});
    };

    for (auto const & [name, role] : evaluators) {
        for (auto const & it : items) {
            std::optional<double> raw;
            if (!trim(it.question).empty() && !trim(it.answer).empty()) {
                if (auto v = llmroles::evaluator_baseline(it.material, it.question, it.answer, *providers.chat, role)) {
                    raw = *v;
                }
            }
            add_rating(name, it, raw);
        }
        ws.log("evaluator: " + name + " rated " + std::to_string(items.size()) + " items");
    }

    std::size_t unmatched = 0;
    for (auto const & rs : c.rating_sets) {
        for (auto const & e : rs.entries) {
            auto id = detail::item_key(e.section_ref, e.question_system_id, e.question_index, e.answer_source_id);
            if (!e.transform.empty()) {
                id += "~" + e.transform;
            }
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                ++unmatched;
                continue;
            }
            add_rating(rs.system_id, *it->second, e.raw_score);
        }
    }
    if (unmatched > 0) {
        ws.report.notes.push_back("evaluator: " + std::to_string(unmatched)
                                  + " corpus ratings refer to items not in this run and were ignored");
    }

    auto & agreement = ws.report.records["evaluator_agreement"];
    for (auto const & [id, by_eval] : ratings) {
        auto const & it = *by_id.at(id);
        for (auto a = by_eval.begin(); a != by_eval.end(); ++a) {
            for (auto b = std::next(a); b != by_eval.end(); ++b) {
                if (!a->second || !b->second) {
                    continue;
                }
                bool const same = lexmetrics::quantize_class(*a->second) == lexmetrics::quantize_class(*b->second);
                agreement.push_back({{"item_id", id},
                                     {"category", it.category},
                                     {"pair", a->first + " ~ " + b->first},
                                     {"agree", same ? 1 : 0}});
            }
        }
    }

    auto & accuracy = ws.report.records["evaluator_class_accuracy"];
    auto & answering = ws.report.records["answering_system"];
    for (auto const & rec : rating_records) {
        auto const & category = rec["category"].get_ref<std::string const &>();
        bool const adversarial = !rec["transform"].get_ref<std::string const &>().empty();
        if (!adversarial && !rec["rating"].is_null()) {
            bool const student = category == category_student;
            answering.push_back({{"answers_by",
                                  student ? rec["answer_source_id"] : rec["question_system_id"]},
                                 {"mode", student ? "student" : "teacher"},
                                 {"evaluator", rec["evaluator"]},
                                 {"item_id", rec["item_id"]},
                                 {"rating", rec["rating"]}});
        }
        if (rec["rating"].is_null() || rec["rouge_class"].is_null()) {
            continue;
        }
        if (!adversarial && category != category_student) {
            continue;
        }
        int const correct = rec["rouge_class"] == rec["predicted_class"] ? 1 : 0;
        std::vector<std::string> subsets;
        if (adversarial) {
            subsets.push_back("adversarial");
        } else {
            subsets.push_back("all");
            if (rec["origin"] == "expert") {
                subsets.push_back("expert");
            }
        }
        for (auto const & s : subsets) {
            accuracy.push_back({{"evaluator", rec["evaluator"]},
                                {"subset", s},
                                {"item_id", rec["item_id"]},
                                {"predicted_class", rec["predicted_class"]},
                                {"rouge_class", rec["rouge_class"]},
                                {"correct", correct}});
        }
    }

    auto & r = ws.report;
    report::add_table(r, detail::spec("evaluator_mean_by_category", "Evaluator: mean rating by item category",
                                      "evaluator_ratings", {"evaluator", "category"}, "rating"));
    report::add_table(r, detail::spec("evaluator_gold_vs_student_by_kind",
                                      "Evaluator: golden vs student answers by material kind", "evaluator_ratings",
                                      {"evaluator", "kind", "category"}, "rating",
                                      {{"category", {category_golden, category_student}}}));
    report::add_table(r, detail::spec("evaluator_agreement", "Evaluator: class agreement between evaluator pairs",
                                      "evaluator_agreement", {"category", "pair"}, "agree"));
    report::add_table(r, detail::spec("evaluator_class_accuracy",
                                      "Evaluator: class accuracy against ROUGE-L recall", "evaluator_class_accuracy",
                                      {"evaluator", "subset"}, "correct"));
    report::add_table(r, detail::spec("evaluator_class_precision",
                                      "Evaluator: precision per predicted class against ROUGE-L recall",
                                      "evaluator_class_accuracy", {"evaluator", "subset", "predicted_class"},
                                      "correct"));
    report::add_table(r, detail::spec("answering_system",
                                      "Answering system: mean rating in student mode and teacher mode",
                                      "answering_system", {"answers_by", "mode"}, "rating"));
}

// --- multiple choice --------------------------------------------------------

inline void score_mcq(Workspace & ws, Config const & cfg, Providers & providers)
{
    auto const & c = ws.corpus;
    if (c.factcheck.empty()) {
        ws.report.notes.push_back("mcq: no fact-check records, stage skipped");
        return;
    }
    auto role = detail::role_config(cfg);
    auto & records = ws.report.records["mcq_predictions"];
    for (auto const mode : cfg.mcq.modes) {
        corpus::McqOptions opts;
        opts.max_options = cfg.mcq.max_options;
        opts.unknowable_fraction = cfg.mcq.unknowable_fraction;
        opts.seed = cfg.seed;
        std::vector<std::string> warnings;
        auto const items = corpus::build_mcq_items(c.factcheck, mode, opts, &warnings);
        for (auto const & w : warnings) {
            ws.report.notes.push_back(std::string("mcq ") + corpus::to_string(mode) + ": " + w);
        }
        std::vector<json> items_out;
        for (auto const & item : items) {
            items_out.push_back(corpus::to_json(item));
        }
        ws.intermediates[std::string("mcq_") + corpus::to_string(mode)] = std::move(items_out);
        if (mode == corpus::McqMode::statement_w_explanation) {
            continue;
        }
        std::size_t k = 0;
        for (auto const & item : items) {
            auto const prediction = llmroles::mcq_baseline(item, *providers.chat, role).value_or("");
            auto const high = report::high_overlap(item);
            auto const phrase = report::has_verdict_phrase(item);
            json rec = {{"mode", corpus::to_string(mode)},
                        {"item", k++},
                        {"source_record_id", item.source_record_id},
                        {"gold_answer", item.gold_answer},
                        {"prediction", prediction},
                        {"has_gold", item.gold_index.has_value()},
                        {"answer_correct", report::answer_correct(item, prediction) ? 1 : 0},
                        {"letter_correct", nullptr},
                        {"verdict_correct", nullptr},
                        {"overlap_split", nullptr},
                        {"phrase_split", nullptr}};
            if (item.gold_index) {
                rec["letter_correct"] = report::letter_correct(item, prediction) ? 1 : 0;
                rec["verdict_correct"] = report::verdict_correct(item, prediction) ? 1 : 0;
                rec["overlap_split"] = *high ? "high_overlap" : "low_overlap";
                rec["phrase_split"] = *phrase ? "with_phrase" : "without_phrase";
            }
            records.push_back(std::move(rec));
        }
        auto const vocab = report::analysis_vocab_split(items, [&] {
            std::vector<std::string> preds;
            for (auto it = records.end() - static_cast<std::ptrdiff_t>(items.size()); it != records.end(); ++it) {
                preds.push_back((*it)["prediction"].get<std::string>());
            }
            return preds;
        }());
        if (!vocab.high_overlap.accuracy() || !vocab.low_overlap.accuracy()) {
            ws.report.notes.push_back(std::string("mcq ") + corpus::to_string(mode)
                                      + ": an overlap split is empty, its accuracy is N/A");
        }
        ws.log(std::string("mcq: answered ") + std::to_string(items.size()) + " " + corpus::to_string(mode)
               + " items");
    }

    auto & r = ws.report;
    report::add_table(r, detail::spec("mcq_accuracy", "Fact-check MCQ: answer accuracy", "mcq_predictions",
                                      {"mode"}, "answer_correct"));
    report::add_table(r, detail::spec("mcq_vocab_split",
                                      "Fact-check MCQ: letter accuracy by vocabulary overlap of the correct option",
                                      "mcq_predictions", {"mode", "overlap_split"}, "letter_correct",
                                      {{"has_gold", true}}));
    report::add_table(r, detail::spec("mcq_verdict_phrase",
                                      "Fact-check MCQ: truthfulness accuracy by explicit verdict phrase",
                                      "mcq_predictions", {"mode", "phrase_split"}, "verdict_correct",
                                      {{"has_gold", true}}));
}

// --- orchestration ----------------------------------------------------------

namespace detail {

template <typename Fn>
void tagged(Stage stage, Fn && fn)
{
    try {
        fn();
    } catch (Error const & e) {
        throw Error(e.category(), std::string("[") + to_string(stage) + "] " + e.what());
    }
}

inline void clear_outputs(fs::path const & out)
{
    for (auto const * sub : {"tables", "records", "intermediate"}) {
        fs::remove_all(out / sub);
    }
    fs::remove(out / "report.md");
}

} // namespace detail

/// Runs the given stages in order and returns the report. Nothing is
/// written to disk; see write_outputs.
inline Workspace run_stages(Config const & cfg, std::vector<Stage> const & stages, Providers & providers,
                            std::function<void(std::string const &)> log = {})
{
    Workspace ws;
    if (log) {
        ws.log = std::move(log);
    }
    ws.corpus = corpus::load_corpus(cfg.corpus_dir);
    ws.log("loaded corpus: " + std::to_string(ws.corpus.section_count()) + " sections, "
           + std::to_string(ws.corpus.question_sets.size()) + " question sets, "
           + std::to_string(ws.corpus.answer_sets.size()) + " answer sets");
    for (auto const stage : all_stages) {
        if (std::find(stages.begin(), stages.end(), stage) == stages.end()) {
            continue;
        }
        detail::tagged(stage, [&] {
            switch (stage) {
            case Stage::baselines: run_baselines(ws, cfg, providers); break;
            case Stage::teacher: score_teacher(ws, cfg, providers); break;
            case Stage::student: score_student(ws, cfg); break;
            case Stage::evaluator: score_evaluator(ws, cfg, providers); break;
            case Stage::mcq: score_mcq(ws, cfg, providers); break;
            }
        });
    }
    std::stable_sort(ws.report.tables.begin(), ws.report.tables.end(),
                     [](auto const & a, auto const & b) { return a.spec.name < b.spec.name; });
    return ws;
}

/// Replaces the report, tables, records and intermediates under out_dir.
inline void write_outputs(Workspace const & ws, fs::path const & out_dir)
{
    detail::clear_outputs(out_dir);
    report::render_report(ws.report, out_dir);
    for (auto const & [name, lines] : ws.intermediates) {
        jsonl::write(out_dir / "intermediate" / (name + ".jsonl"), lines);
    }
}

} // namespace sensemaker::pipeline
