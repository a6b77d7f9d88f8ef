#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/text.hpp"
#include "sensemaker/corpus/types.hpp"
#include "sensemaker/llmroles/chat.hpp"
#include "sensemaker/llmroles/prompts.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sensemaker::llmroles {

/// Settings shared by the baseline roles.
struct RoleConfig
{
    std::string system_id = "baseline";
    std::string model = "gpt-4.1-nano-2025-04-14";
    double temperature = 0.0;
    int max_retries = 3;
    PromptSet prompts;
};

struct Span
{
    std::string text;
    std::size_t start_token = 0;
    std::size_t end_token = 0;
};

/// n spans of span_tokens whitespace tokens with evenly spaced start
/// offsets from the first token to the last possible start. Spans of short
/// texts are clamped to the text end and may coincide.
inline std::vector<Span> extract_spans(std::string const & text, std::size_t n, std::size_t span_tokens)
{
    if (n < 1) {
        throw ArgumentError("extract_spans: n must be at least 1");
    }
    if (span_tokens < 1) {
        throw ArgumentError("extract_spans: span_tokens must be at least 1");
    }
    auto const tokens = whitespace_spans(text);
    if (tokens.empty()) {
        throw ArgumentError("extract_spans: empty text");
    }
    std::size_t const total = tokens.size();
    std::size_t const last_start = total > span_tokens ? total - span_tokens : 0;
    std::vector<Span> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start = 0;
        if (n > 1) {
            start = static_cast<std::size_t>(
                std::llround(static_cast<double>(i) * static_cast<double>(last_start) / static_cast<double>(n - 1)));
        }
        std::size_t const end = std::min(total, start + span_tokens);
        out.push_back({text.substr(tokens[start].begin, tokens[end - 1].end - tokens[start].begin), start, end});
    }
    return out;
}

template <typename T>
struct RoleResult
{
    T value;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string render(std::string const & tmpl, std::initializer_list<std::pair<char const *, std::string const *>> vars)
{
    return render_template(tmpl, [&](std::string const & name) -> std::string const * {
        for (auto const & [k, v] : vars) {
            if (name == k) {
                return v;
            }
        }
        return nullptr;
    });
}

inline ChatRequest make_request(RoleConfig const & cfg, std::string task, std::string prompt, json schema,
                                std::string schema_name, json annotations)
{
    ChatRequest r;
    r.model = cfg.model;
    r.messages = {{"user", std::move(prompt)}};
    r.structured_schema = std::move(schema);
    r.schema_name = std::move(schema_name);
    r.temperature = cfg.temperature;
    r.max_retries = cfg.max_retries;
    r.task = std::move(task);
    r.annotations = std::move(annotations);
    return r;
}

/// Tries up to 1 + max_retries attempts; `parse` returns nullopt on a
/// malformed reply. Returns nullopt and records the last problem when every
/// attempt fails.
template <typename Parse>
auto call_with_retries(ChatProvider & provider, ChatRequest request, Parse && parse, std::string & problem)
    -> decltype(parse(std::string{}))
{
    for (int attempt = 0; attempt <= request.max_retries; ++attempt) {
        request.attempt = attempt;
        try {
            auto const reply = provider.complete(request);
            if (auto parsed = parse(reply)) {
                return parsed;
            }
            problem = "malformed reply";
        } catch (ProviderError const & e) {
            problem = e.what();
        }
    }
    return std::nullopt;
}

inline std::optional<json> parse_json_object(std::string const & text)
{
    auto const begin = text.find('{');
    auto const end = text.rfind('}');
    if (begin == std::string::npos || end == std::string::npos || end < begin) {
        return std::nullopt;
    }
    auto j = json::parse(text.substr(begin, end - begin + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        return std::nullopt;
    }
    return j;
}

inline json teacher_schema()
{
    return {{"type", "object"},
            {"properties", {{"question", {{"type", "string"}}}, {"answer", {{"type", "string"}}}}},
            {"required", {"question", "answer"}},
            {"additionalProperties", false}};
}

inline json student_schema()
{
    return {{"type", "object"},
            {"properties", {{"answers", {{"type", "array"}, {"items", {{"type", {"string", "null"}}}}}}}},
            {"required", {"answers"}},
            {"additionalProperties", false}};
}

inline json mcq_schema()
{
    return {{"type", "object"},
            {"properties", {{"answer", {{"type", "string"}}}}},
            {"required", {"answer"}},
            {"additionalProperties", false}};
}

inline json evaluator_schema()
{
    return {{"type", "object"},
            {"properties", {{"rating", {{"type", "integer"}, {"minimum", 0}, {"maximum", 5}}}}},
            {"required", {"rating"}},
            {"additionalProperties", false}};
}

} // namespace detail

/// Question generation baseline: one request per extracted span, asking for
/// one question and a reference answer answerable from that span. Slots whose
/// requests keep failing are dropped with a warning.
inline RoleResult<corpus::QuestionSet> teacher_baseline(corpus::SectionRef const & ref,
                                                        corpus::Section const & section,
                                                        std::size_t n_questions,
                                                        std::size_t span_tokens,
                                                        ChatProvider & provider,
                                                        RoleConfig const & cfg)
{
    RoleResult<corpus::QuestionSet> out;
    out.value.system_id = cfg.system_id;
    out.value.section_ref = ref;
    if (n_questions == 0) {
        return out;
    }
    auto const spans = extract_spans(section.text, n_questions, span_tokens);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        auto const prompt = detail::render(cfg.prompts.teacher, {{"material", &section.text}, {"span", &spans[i].text}});
        auto request = detail::make_request(cfg, "teacher", prompt, detail::teacher_schema(), "quiz_question",
                                            {{"material", section.text}, {"span", spans[i].text}});
        std::string problem;
        auto parsed = detail::call_with_retries(provider, request, [](std::string const & reply) -> std::optional<corpus::Question> {
            auto j = detail::parse_json_object(reply);
            if (!j || !j->contains("question") || !(*j)["question"].is_string() || !j->contains("answer")
                || !(*j)["answer"].is_string()) {
                return std::nullopt;
            }
            corpus::Question q;
            q.question = trim((*j)["question"].get<std::string>());
            if (q.question.empty()) {
                return std::nullopt;
            }
            auto answer = trim((*j)["answer"].get<std::string>());
            if (!answer.empty()) {
                q.reference_answer = std::move(answer);
            }
            return q;
        }, problem);
        if (parsed) {
            out.value.questions.push_back(std::move(*parsed));
        } else {
            out.warnings.push_back("teacher baseline: dropped question " + std::to_string(i + 1) + " of "
                                   + ref.str() + ": " + problem);
        }
    }
    return out;
}

/// Answering baseline: one request with the whole section and all questions.
inline RoleResult<corpus::AnswerSet> student_baseline(corpus::Section const & section,
                                                      corpus::QuestionSet const & qset,
                                                      ChatProvider & provider,
                                                      RoleConfig const & cfg)
{
    RoleResult<corpus::AnswerSet> out;
    out.value.system_id = cfg.system_id;
    out.value.section_ref = qset.section_ref;
    out.value.question_system_id = qset.system_id;
    std::size_t const n = qset.questions.size();
    out.value.answers.assign(n, std::nullopt);
    if (n == 0) {
        return out;
    }

    std::string numbered;
    json question_list = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        numbered += std::to_string(i + 1) + ". " + qset.questions[i].question + "\n";
        question_list.push_back(qset.questions[i].question);
    }
    auto const prompt = detail::render(cfg.prompts.student, {{"material", &section.text}, {"questions", &numbered}});
    auto request = detail::make_request(cfg, "student", prompt, detail::student_schema(), "quiz_answers",
                                        {{"material", section.text}, {"questions", question_list}});
    std::string problem;
    auto parsed = detail::call_with_retries(provider, request, [](std::string const & reply) -> std::optional<json> {
        auto j = detail::parse_json_object(reply);
        if (!j || !j->contains("answers") || !(*j)["answers"].is_array()) {
            return std::nullopt;
        }
        for (auto const & a : (*j)["answers"]) {
            if (!a.is_string() && !a.is_null()) {
                return std::nullopt;
            }
        }
        return (*j)["answers"];
    }, problem);

    auto const where = qset.section_ref.str() + " (questions by " + qset.system_id + ")";
    if (!parsed) {
        out.warnings.push_back("student baseline: no usable answers for " + where + ": " + problem);
        return out;
    }
    auto const & answers = *parsed;
    if (answers.size() > n) {
        out.warnings.push_back("student baseline: ignored " + std::to_string(answers.size() - n)
                               + " surplus answers for " + where);
    } else if (answers.size() < n) {
        out.warnings.push_back("student baseline: only " + std::to_string(answers.size()) + " of "
                               + std::to_string(n) + " answers for " + where);
    }
    for (std::size_t i = 0; i < std::min(n, answers.size()); ++i) {
        if (answers[i].is_string() && !trim(answers[i].get<std::string>()).empty()) {
            out.value.answers[i] = answers[i].get<std::string>();
        }
    }
    return out;
}

/// Parses a 0..5 rating from a structured reply or bare integer text.
inline std::optional<int> parse_rating_0_5(std::string const & reply)
{
    auto const check = [](json const & v) -> std::optional<int> {
        if (v.is_number_integer()) {
            auto const x = v.get<long long>();
            if (x >= 0 && x <= 5) {
                return static_cast<int>(x);
            }
        }
        return std::nullopt;
    };
    if (auto j = detail::parse_json_object(reply)) {
        if (j->contains("rating")) {
            return check((*j)["rating"]);
        }
        return std::nullopt;
    }
    auto const t = trim(reply);
    auto const v = json::parse(t, nullptr, false);
    if (v.is_discarded()) {
        return std::nullopt;
    }
    return check(v);
}

/// Grading baseline: asks for a 0..5 rating and scales it to 0..100 by 20.
/// Returns nullopt when no valid rating is obtained after retries.
inline std::optional<int> evaluator_baseline(std::string const & material,
                                             std::string const & question,
                                             std::string const & answer,
                                             ChatProvider & provider,
                                             RoleConfig const & cfg)
{
    if (trim(material).empty() || trim(question).empty() || trim(answer).empty()) {
        throw ArgumentError("evaluator_baseline: material, question and answer must be non-empty");
    }
    auto const prompt = detail::render(cfg.prompts.evaluator,
                                       {{"material", &material}, {"question", &question}, {"answer", &answer}});
    auto request = detail::make_request(cfg, "evaluator", prompt, detail::evaluator_schema(), "rating",
                                        {{"material", material}, {"question", question}, {"answer", answer}});
    std::string problem;
    auto rating = detail::call_with_retries(provider, request, parse_rating_0_5, problem);
    if (!rating) {
        return std::nullopt;
    }
    return *rating * 20;
}

/// Answers one multiple-choice item with the student prompt. Returns the raw
/// answer text, or nullopt when every attempt fails.
inline std::optional<std::string> mcq_baseline(corpus::McqItem const & item, ChatProvider & provider,
                                               RoleConfig const & cfg)
{
    auto const prompt = detail::render(cfg.prompts.student, {{"material", &item.material_text},
                                                             {"questions", &item.question_text}});
    auto request = detail::make_request(cfg, "mcq", prompt, detail::mcq_schema(), "mcq_answer",
                                        {{"material", item.material_text}, {"options", item.options}});
    std::string problem;
    return detail::call_with_retries(
        provider, request,
        [](std::string const & reply) -> std::optional<std::string> {
            auto j = detail::parse_json_object(reply);
            if (!j || !j->contains("answer") || !(*j)["answer"].is_string()) {
                return std::nullopt;
            }
            return (*j)["answer"].get<std::string>();
        },
        problem);
}

} // namespace sensemaker::llmroles
