#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/rng.hpp"
#include "sensemaker/common/text.hpp"
#include "sensemaker/corpus/types.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace sensemaker::corpus {

/// Question framing for the multiple-choice modes. `{{options}}` expands to
/// the lettered option list and `{{speaker}}` to the speaker name.
struct McqTemplates
{
    std::string determine_statement =
        "The material is a fact-check explanation of one statement made by {{speaker}}. "
        "Below are possible statements by {{speaker}}, labelled with letters.\n"
        "{{options}}\n"
        "Determine which statement the explanation in the material relates to and whether it was "
        "assessed as true or untrue. Answer TRUE followed by the letter of the statement, FALSE "
        "followed by the letter of the statement, or UNKNOWABLE if none of the statements matches "
        "the explanation.";
    std::string determine_explanation =
        "The material is a statement made by {{speaker}}. Below are possible fact-check "
        "explanations of statements by {{speaker}}, labelled with letters.\n"
        "{{options}}\n"
        "Determine which explanation relates to the statement in the material and whether the "
        "statement was assessed as true or untrue. Answer TRUE followed by the letter of the "
        "explanation, FALSE followed by the letter of the explanation, or UNKNOWABLE if none of "
        "the explanations matches the statement.";
};

struct McqOptions
{
    std::size_t max_options = 5;
    double unknowable_fraction = 0.2;
    std::uint64_t seed = 0;
    McqTemplates templates;
};

namespace detail {

inline bool gold_eligible(Verdict v)
{
    return v == Verdict::true_ || v == Verdict::untrue;
}

inline std::string options_block(std::vector<std::string> const & options)
{
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (i != 0) {
            out += '\n';
        }
        out += option_letter(i);
        out += ") ";
        out += options[i];
    }
    return out;
}

} // namespace detail

/// Builds multiple-choice items from fact-check records.
///
/// In the two determine modes one item is produced per record whose verdict
/// is true or untrue. Its options are the matching record plus confounders
/// drawn from the same speaker's other records (any verdict). A seeded subset
/// of round(unknowable_fraction * n) items omits the matching option and
/// expects UNKNOWABLE. Speakers without eligible records are skipped and
/// reported through `warnings`.
inline std::vector<McqItem> build_mcq_items(std::vector<FactCheckRecord> const & records,
                                            McqMode mode,
                                            McqOptions const & opts,
                                            std::vector<std::string> * warnings = nullptr)
{
    if (opts.max_options < 2) {
        throw ArgumentError("max_options must be at least 2");
    }
    if (!(opts.unknowable_fraction >= 0.0 && opts.unknowable_fraction <= 1.0)) {
        throw ArgumentError("unknowable_fraction must lie in [0, 1]");
    }
    if (opts.max_options > 26) {
        throw ArgumentError("max_options must not exceed 26");
    }

    std::vector<McqItem> items;
    if (mode == McqMode::statement_w_explanation) {
        for (auto const & r : records) {
            McqItem item;
            item.mode = mode;
            item.material_text = r.statement + "\n\n" + r.short_explanation + "\n\n" + r.long_explanation;
            item.source_record_id = r.id;
            items.push_back(std::move(item));
        }
        return items;
    }

    std::map<std::string, std::vector<std::size_t>> by_speaker;
    for (std::size_t i = 0; i < records.size(); ++i) {
        by_speaker[records[i].speaker].push_back(i);
    }

    std::vector<std::size_t> golds;
    for (auto const & [speaker, members] : by_speaker) {
        std::size_t before = golds.size();
        for (auto i : members) {
            if (detail::gold_eligible(records[i].verdict)) {
                golds.push_back(i);
            }
        }
        if (golds.size() == before && warnings) {
            warnings->push_back("speaker '" + speaker + "' has no record with a true/untrue verdict; skipped");
        }
    }

    auto const n_unknowable = static_cast<std::size_t>(
        std::llround(opts.unknowable_fraction * static_cast<double>(golds.size())));
    std::vector<std::size_t> order(golds.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    Rng(opts.seed, "mcq-unknowable").shuffle(order);
    std::vector<bool> unknowable(golds.size(), false);
    for (std::size_t i = 0; i < n_unknowable; ++i) {
        unknowable[order[i]] = true;
    }

    bool const by_statement = mode == McqMode::determine_statement;
    auto const & tmpl = by_statement ? opts.templates.determine_statement : opts.templates.determine_explanation;

    for (std::size_t g = 0; g < golds.size(); ++g) {
        auto const & gold = records[golds[g]];
        Rng rng(opts.seed, std::string(to_string(mode)) + ":" + gold.id);

        std::vector<std::size_t> others;
        for (auto i : by_speaker[gold.speaker]) {
            if (i != golds[g]) {
                others.push_back(i);
            }
        }
        rng.shuffle(others);
        std::size_t const slots = unknowable[g] ? opts.max_options : opts.max_options - 1;
        if (others.size() > slots) {
            others.resize(slots);
        }

        std::vector<std::size_t> chosen;
        if (!unknowable[g]) {
            chosen.push_back(golds[g]);
        }
        chosen.insert(chosen.end(), others.begin(), others.end());
        rng.shuffle(chosen);

        McqItem item;
        item.mode = mode;
        item.source_record_id = gold.id;
        item.material_text = by_statement ? gold.long_explanation : gold.statement;
        for (std::size_t k = 0; k < chosen.size(); ++k) {
            auto const & r = records[chosen[k]];
            item.options.push_back(by_statement ? r.statement : r.long_explanation);
            item.option_provenance.push_back(r.id);
            if (chosen[k] == golds[g]) {
                item.gold_index = k;
            }
        }
        if (item.gold_index) {
            item.gold_answer = std::string(gold.verdict == Verdict::true_ ? "TRUE " : "FALSE ")
                               + option_letter(*item.gold_index);
        } else {
            item.gold_answer = "UNKNOWABLE";
        }
        auto const block = detail::options_block(item.options);
        item.question_text = render_template(tmpl, [&](std::string const & name) -> std::string const * {
            if (name == "options") return &block;
            if (name == "speaker") return &gold.speaker;
            return nullptr;
        });
        items.push_back(std::move(item));
    }
    return items;
}

/// A parsed multiple-choice answer.
struct McqAnswer
{
    enum class Kind { true_, false_, unknowable };
    Kind kind = Kind::unknowable;
    std::optional<char> letter;

    friend bool operator==(McqAnswer const &, McqAnswer const &) = default;
};

/// Parses "TRUE C", "false (c)", "TRUE: section B", "UNKNOWABLE" and the
/// like, case-insensitively. The earliest verdict word in the text wins.
inline std::optional<McqAnswer> parse_mcq_answer(std::string const & text)
{
    static std::regex const verdict_re(R"(\b(TRUE|FALSE|UNKNOWABLE)\b)", std::regex::icase);
    static std::regex const letter_re(R"(^[\s:,.\-]*(?:SECTION|OPTION)?[\s:]*[\(\[]?\s*([A-Z])\b)",
                                      std::regex::icase);
    std::smatch m;
    if (!std::regex_search(text, m, verdict_re)) {
        return std::nullopt;
    }
    auto const word = to_lower_ascii(m[1].str());
    McqAnswer out;
    if (word == "unknowable") {
        out.kind = McqAnswer::Kind::unknowable;
        return out;
    }
    out.kind = word == "true" ? McqAnswer::Kind::true_ : McqAnswer::Kind::false_;
    std::string const rest = m.suffix().str();
    std::smatch lm;
    if (std::regex_search(rest, lm, letter_re)) {
        out.letter = static_cast<char>(std::toupper(static_cast<unsigned char>(lm[1].str()[0])));
    }
    return out;
}

} // namespace sensemaker::corpus
