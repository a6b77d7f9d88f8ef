#pragma once

#include "sensemaker/adversarial/rescue.hpp"

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sensemaker::corpus {

/// Identifies a section: the material kind it belongs to and its id.
struct SectionRef
{
    std::string kind;
    std::string section_id;

    friend auto operator<=>(SectionRef const &, SectionRef const &) = default;

    [[nodiscard]] std::string str() const { return kind + "/" + section_id; }
};

struct Section
{
    std::string id;
    std::string text;
    std::string language = "en";

    friend bool operator==(Section const &, Section const &) = default;
};

struct Material
{
    std::string kind;
    std::vector<Section> sections;

    friend bool operator==(Material const &, Material const &) = default;
};

struct Question
{
    std::string question;
    std::optional<std::string> reference_answer;

    friend bool operator==(Question const &, Question const &) = default;
};

struct QuestionSet
{
    std::string system_id;
    SectionRef section_ref;
    std::vector<Question> questions;

    friend bool operator==(QuestionSet const &, QuestionSet const &) = default;
};

/// Answers aligned by index with the questions of one question set. A missing
/// entry means the question was left unanswered.
struct AnswerSet
{
    std::string system_id;
    SectionRef section_ref;
    std::string question_system_id;
    std::vector<std::optional<std::string>> answers;

    friend bool operator==(AnswerSet const &, AnswerSet const &) = default;
};

struct RatingEntry
{
    SectionRef section_ref;
    std::string question_system_id;
    std::size_t question_index = 0;
    std::string answer_source_id;
    /// Adversarial transform of the rated item; empty for genuine items.
    std::string transform;
    double raw_score = 0.0;
    std::optional<adversarial::RescuedScore> rescued_score;

    friend bool operator==(RatingEntry const &, RatingEntry const &) = default;
};

struct RatingSet
{
    std::string system_id;
    std::vector<RatingEntry> entries;

    friend bool operator==(RatingSet const &, RatingSet const &) = default;
};

enum class Verdict { true_, untrue, misleading, undecidable };

inline char const * to_string(Verdict v)
{
    switch (v) {
    case Verdict::true_: return "true";
    case Verdict::untrue: return "untrue";
    case Verdict::misleading: return "misleading";
    case Verdict::undecidable: return "undecidable";
    }
    return "undecidable";
}

inline std::optional<Verdict> parse_verdict(std::string const & s)
{
    if (s == "true") return Verdict::true_;
    if (s == "untrue") return Verdict::untrue;
    if (s == "misleading") return Verdict::misleading;
    if (s == "undecidable") return Verdict::undecidable;
    return std::nullopt;
}

struct FactCheckRecord
{
    std::string id;
    std::string speaker;
    std::string statement;
    std::string short_explanation;
    std::string long_explanation;
    Verdict verdict = Verdict::undecidable;

    friend bool operator==(FactCheckRecord const &, FactCheckRecord const &) = default;
};

enum class McqMode { statement_w_explanation, determine_statement, determine_explanation };

inline char const * to_string(McqMode m)
{
    switch (m) {
    case McqMode::statement_w_explanation: return "statement_w_explanation";
    case McqMode::determine_statement: return "determine_statement";
    case McqMode::determine_explanation: return "determine_explanation";
    }
    return "";
}

inline std::optional<McqMode> parse_mcq_mode(std::string const & s)
{
    if (s == "statement_w_explanation") return McqMode::statement_w_explanation;
    if (s == "determine_statement") return McqMode::determine_statement;
    if (s == "determine_explanation") return McqMode::determine_explanation;
    return std::nullopt;
}

/// A multiple-choice item built from fact-check records.
struct McqItem
{
    McqMode mode = McqMode::determine_statement;
    std::string material_text;
    std::string question_text;
    /// "TRUE <letter>", "FALSE <letter>" or "UNKNOWABLE". Empty for
    /// statement_w_explanation items, which carry material only.
    std::string gold_answer;
    /// Option texts in letter order (A, B, ...).
    std::vector<std::string> options;
    /// Source record id of each option, aligned with options.
    std::vector<std::string> option_provenance;
    /// Record the material was built from.
    std::string source_record_id;
    /// Index of the matching option, absent for UNKNOWABLE items.
    std::optional<std::size_t> gold_index;

    friend bool operator==(McqItem const &, McqItem const &) = default;
};

inline char option_letter(std::size_t index)
{
    return static_cast<char>('A' + index);
}

/// Whole input corpus. Materials are kept sorted by kind.
struct Corpus
{
    std::vector<Material> materials;
    std::vector<QuestionSet> question_sets;
    std::vector<AnswerSet> answer_sets;
    std::vector<RatingSet> rating_sets;
    std::vector<FactCheckRecord> factcheck;

    friend bool operator==(Corpus const &, Corpus const &) = default;

    [[nodiscard]] Section const * find_section(SectionRef const & ref) const
    {
        for (auto const & m : materials) {
            if (m.kind != ref.kind) {
                continue;
            }
            for (auto const & s : m.sections) {
                if (s.id == ref.section_id) {
                    return &s;
                }
            }
        }
        return nullptr;
    }

    [[nodiscard]] QuestionSet const * find_question_set(SectionRef const & ref,
                                                        std::string const & system_id) const
    {
        for (auto const & q : question_sets) {
            if (q.section_ref == ref && q.system_id == system_id) {
                return &q;
            }
        }
        return nullptr;
    }

    [[nodiscard]] std::vector<SectionRef> section_refs() const
    {
        std::vector<SectionRef> out;
        for (auto const & m : materials) {
            for (auto const & s : m.sections) {
                out.push_back({m.kind, s.id});
            }
        }
        return out;
    }

    [[nodiscard]] std::size_t section_count() const
    {
        std::size_t n = 0;
        for (auto const & m : materials) {
            n += m.sections.size();
        }
        return n;
    }
};

} // namespace sensemaker::corpus
