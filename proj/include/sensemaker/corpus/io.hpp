#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/jsonl.hpp"
#include "sensemaker/common/text.hpp"
#include "sensemaker/corpus/types.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sensemaker::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr char const * materials_file = "materials.jsonl";
inline constexpr char const * questions_file = "questions.jsonl";
inline constexpr char const * answers_file = "answers.jsonl";
inline constexpr char const * ratings_file = "ratings.jsonl";
inline constexpr char const * factcheck_file = "factcheck.jsonl";

// --- record <-> JSON -------------------------------------------------------

inline json to_json(QuestionSet const & qs)
{
    json questions = json::array();
    for (auto const & q : qs.questions) {
        json j = {{"question", q.question}};
        if (q.reference_answer) {
            j["reference_answer"] = *q.reference_answer;
        }
        questions.push_back(std::move(j));
    }
    return {{"system_id", qs.system_id},
            {"kind", qs.section_ref.kind},
            {"section_id", qs.section_ref.section_id},
            {"questions", std::move(questions)}};
}

inline json to_json(AnswerSet const & as)
{
    json answers = json::array();
    for (auto const & a : as.answers) {
        answers.push_back(a ? json(*a) : json(nullptr));
    }
    return {{"system_id", as.system_id},
            {"kind", as.section_ref.kind},
            {"section_id", as.section_ref.section_id},
            {"question_system_id", as.question_system_id},
            {"answers", std::move(answers)}};
}

inline json to_json(std::string const & system_id, RatingEntry const & e)
{
    json j = {{"system_id", system_id},
              {"kind", e.section_ref.kind},
              {"section_id", e.section_ref.section_id},
              {"question_system_id", e.question_system_id},
              {"question_index", e.question_index},
              {"answer_source_id", e.answer_source_id},
              {"raw_score", e.raw_score}};
    if (!e.transform.empty()) {
        j["transform"] = e.transform;
    }
    return j;
}

inline json to_json(FactCheckRecord const & r)
{
    return {{"id", r.id},
            {"speaker", r.speaker},
            {"statement", r.statement},
            {"short_explanation", r.short_explanation},
            {"long_explanation", r.long_explanation},
            {"verdict", to_string(r.verdict)}};
}

inline json to_json(McqItem const & item)
{
    json j = {{"mode", to_string(item.mode)},
              {"material_text", item.material_text},
              {"question_text", item.question_text},
              {"gold_answer", item.gold_answer},
              {"options", item.options},
              {"option_provenance", item.option_provenance},
              {"source_record_id", item.source_record_id}};
    j["gold_index"] = item.gold_index ? json(*item.gold_index) : json(nullptr);
    return j;
}

// --- parsing ---------------------------------------------------------------

namespace detail {

inline SectionRef read_ref(jsonl::FieldReader const & f)
{
    return {f.non_empty_string("kind"), f.non_empty_string("section_id")};
}

inline std::vector<jsonl::Line> read_optional(fs::path const & path)
{
    if (!fs::exists(path)) {
        return {};
    }
    return jsonl::read(path);
}

} // namespace detail

inline std::vector<Material> parse_materials(fs::path const & path)
{
    std::map<std::string, Material> by_kind;
    std::set<SectionRef> seen;
    for (auto const & line : jsonl::read(path)) {
        jsonl::FieldReader f(path.string(), line);
        Section s;
        auto const kind = f.non_empty_string("kind");
        s.id = f.non_empty_string("section_id");
        s.text = f.non_empty_string("text");
        if (auto lang = f.optional_string("language")) {
            s.language = *lang;
        }
        if (!seen.insert({kind, s.id}).second) {
            f.fail("section_id", "duplicate section id '" + s.id + "' in material '" + kind + "'");
        }
        auto & m = by_kind[kind];
        m.kind = kind;
        m.sections.push_back(std::move(s));
    }
    std::vector<Material> out;
    for (auto & [kind, m] : by_kind) {
        out.push_back(std::move(m));
    }
    return out;
}

inline std::vector<QuestionSet> parse_question_sets(fs::path const & path)
{
    std::vector<QuestionSet> out;
    for (auto const & line : detail::read_optional(path)) {
        jsonl::FieldReader f(path.string(), line);
        QuestionSet qs;
        qs.system_id = f.non_empty_string("system_id");
        qs.section_ref = detail::read_ref(f);
        auto const & arr = f.array("questions");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto const field = "questions[" + std::to_string(i) + "]";
            auto const & q = arr[i];
            if (!q.is_object() || !q.contains("question") || !q["question"].is_string()) {
                f.fail(field + ".question", "expected an object with a string 'question'");
            }
            Question question;
            question.question = q["question"].get<std::string>();
            if (trim(question.question).empty()) {
                f.fail(field + ".question", "must not be empty");
            }
            if (auto it = q.find("reference_answer"); it != q.end() && !it->is_null()) {
                if (!it->is_string()) {
                    f.fail(field + ".reference_answer", "expected a string or null");
                }
                question.reference_answer = it->get<std::string>();
            }
            qs.questions.push_back(std::move(question));
        }
        out.push_back(std::move(qs));
    }
    return out;
}

inline std::vector<AnswerSet> parse_answer_sets(fs::path const & path)
{
    std::vector<AnswerSet> out;
    for (auto const & line : detail::read_optional(path)) {
        jsonl::FieldReader f(path.string(), line);
        AnswerSet as;
        as.system_id = f.non_empty_string("system_id");
        as.section_ref = detail::read_ref(f);
        as.question_system_id = f.optional_string("question_system_id").value_or("");
        auto const & arr = f.array("answers");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (arr[i].is_null()) {
                as.answers.emplace_back(std::nullopt);
            } else if (arr[i].is_string()) {
                as.answers.emplace_back(arr[i].get<std::string>());
            } else {
                f.fail("answers[" + std::to_string(i) + "]", "expected a string or null");
            }
        }
        out.push_back(std::move(as));
    }
    return out;
}

inline std::vector<RatingSet> parse_rating_sets(fs::path const & path)
{
    std::vector<RatingSet> out;
    std::map<std::string, std::size_t> index;
    for (auto const & line : detail::read_optional(path)) {
        jsonl::FieldReader f(path.string(), line);
        auto const system = f.non_empty_string("system_id");
        RatingEntry e;
        e.section_ref = detail::read_ref(f);
        e.question_system_id = f.optional_string("question_system_id").value_or("");
        e.question_index = f.index("question_index");
        e.answer_source_id = f.non_empty_string("answer_source_id");
        e.transform = f.optional_string("transform").value_or("");
        e.raw_score = f.number("raw_score");
        e.rescued_score = adversarial::rescue_rating(e.raw_score);
        auto [it, inserted] = index.try_emplace(system, out.size());
        if (inserted) {
            out.push_back({system, {}});
        }
        out[it->second].entries.push_back(std::move(e));
    }
    return out;
}

inline std::vector<FactCheckRecord> parse_factcheck(fs::path const & path)
{
    std::vector<FactCheckRecord> out;
    std::set<std::string> ids;
    for (auto const & line : detail::read_optional(path)) {
        jsonl::FieldReader f(path.string(), line);
        FactCheckRecord r;
        r.id = f.optional_string("id").value_or("fc-" + std::to_string(line.number));
        r.speaker = f.non_empty_string("speaker");
        r.statement = f.non_empty_string("statement");
        r.short_explanation = f.string("short_explanation");
        r.long_explanation = f.non_empty_string("long_explanation");
        auto const verdict = f.string("verdict");
        auto v = parse_verdict(verdict);
        if (!v) {
            f.fail("verdict", "expected one of true, untrue, misleading, undecidable; got '" + verdict + "'");
        }
        r.verdict = *v;
        if (!ids.insert(r.id).second) {
            f.fail("id", "duplicate record id '" + r.id + "'");
        }
        out.push_back(std::move(r));
    }
    return out;
}

// --- validation ------------------------------------------------------------

/// Resolves and checks all cross references. Fills in an omitted
/// question_system_id when exactly one candidate exists.
inline void resolve_references(Corpus & c)
{
    std::set<std::pair<SectionRef, std::string>> qset_keys;
    for (auto const & qs : c.question_sets) {
        if (!c.find_section(qs.section_ref)) {
            throw ReferenceError("question set of '" + qs.system_id + "' references unknown section "
                                 + qs.section_ref.str());
        }
        if (!qset_keys.insert({qs.section_ref, qs.system_id}).second) {
            throw ReferenceError("duplicate question set of '" + qs.system_id + "' for section "
                                 + qs.section_ref.str());
        }
    }

    auto sole_question_set = [&](SectionRef const & ref) -> QuestionSet const * {
        QuestionSet const * found = nullptr;
        for (auto const & qs : c.question_sets) {
            if (qs.section_ref == ref) {
                if (found) {
                    return nullptr;
                }
                found = &qs;
            }
        }
        return found;
    };

    for (auto & as : c.answer_sets) {
        if (!c.find_section(as.section_ref)) {
            throw ReferenceError("answer set of '" + as.system_id + "' references unknown section "
                                 + as.section_ref.str());
        }
        QuestionSet const * qs = nullptr;
        if (as.question_system_id.empty()) {
            qs = sole_question_set(as.section_ref);
            if (!qs) {
                throw ReferenceError("answer set of '" + as.system_id + "' for " + as.section_ref.str()
                                     + " needs question_system_id: zero or several question sets exist");
            }
            as.question_system_id = qs->system_id;
        } else {
            qs = c.find_question_set(as.section_ref, as.question_system_id);
            if (!qs) {
                throw ReferenceError("answer set of '" + as.system_id + "' references unknown question set '"
                                     + as.question_system_id + "' for " + as.section_ref.str());
            }
        }
        if (as.answers.size() != qs->questions.size()) {
            throw ReferenceError("answer set of '" + as.system_id + "' for " + as.section_ref.str() + " has "
                                 + std::to_string(as.answers.size()) + " answers but question set '"
                                 + qs->system_id + "' has " + std::to_string(qs->questions.size())
                                 + " questions");
        }
    }

    for (auto & rs : c.rating_sets) {
        for (auto & e : rs.entries) {
            if (!c.find_section(e.section_ref)) {
                throw ReferenceError("rating by '" + rs.system_id + "' references unknown section "
                                     + e.section_ref.str());
            }
            if (e.question_system_id.empty()) {
                for (auto const & as : c.answer_sets) {
                    if (as.section_ref == e.section_ref && as.system_id == e.answer_source_id) {
                        e.question_system_id = as.question_system_id;
                        break;
                    }
                }
            }
            if (e.question_system_id.empty()) {
                if (auto const * qs = sole_question_set(e.section_ref)) {
                    e.question_system_id = qs->system_id;
                }
            }
            auto const * qs = c.find_question_set(e.section_ref, e.question_system_id);
            if (!qs) {
                throw ReferenceError("rating by '" + rs.system_id + "' for " + e.section_ref.str()
                                     + " cannot be matched to a question set");
            }
            if (e.question_index >= qs->questions.size()) {
                throw ReferenceError("rating by '" + rs.system_id + "' for " + e.section_ref.str()
                                     + " has question_index " + std::to_string(e.question_index)
                                     + " beyond question set size " + std::to_string(qs->questions.size()));
            }
        }
    }
}

/// Loads and validates a corpus directory. Only materials.jsonl is required.
inline Corpus load_corpus(fs::path const & dir)
{
    if (!fs::is_directory(dir)) {
        throw DataError("corpus directory not found: " + dir.string());
    }
    Corpus c;
    c.materials = parse_materials(dir / materials_file);
    c.question_sets = parse_question_sets(dir / questions_file);
    c.answer_sets = parse_answer_sets(dir / answers_file);
    c.rating_sets = parse_rating_sets(dir / ratings_file);
    c.factcheck = parse_factcheck(dir / factcheck_file);
    resolve_references(c);
    return c;
}

inline void save_corpus(Corpus const & c, fs::path const & dir)
{
    fs::create_directories(dir);
    std::vector<json> lines;
    for (auto const & m : c.materials) {
        for (auto const & s : m.sections) {
            lines.push_back({{"kind", m.kind}, {"section_id", s.id}, {"language", s.language}, {"text", s.text}});
        }
    }
    jsonl::write(dir / materials_file, lines);

    lines.clear();
    for (auto const & qs : c.question_sets) {
        lines.push_back(to_json(qs));
    }
    jsonl::write(dir / questions_file, lines);

    lines.clear();
    for (auto const & as : c.answer_sets) {
        lines.push_back(to_json(as));
    }
    jsonl::write(dir / answers_file, lines);

    lines.clear();
    for (auto const & rs : c.rating_sets) {
        for (auto const & e : rs.entries) {
            lines.push_back(to_json(rs.system_id, e));
        }
    }
    jsonl::write(dir / ratings_file, lines);

    lines.clear();
    for (auto const & r : c.factcheck) {
        lines.push_back(to_json(r));
    }
    jsonl::write(dir / factcheck_file, lines);
}

} // namespace sensemaker::corpus
