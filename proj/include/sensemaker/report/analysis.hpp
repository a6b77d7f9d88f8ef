#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/corpus/mcq.hpp"
#include "sensemaker/lexmetrics/overlap.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sensemaker::report {

/// Accuracy over one split; `accuracy()` is empty for an empty split.
struct SplitAccuracy
{
    std::size_t n = 0;
    std::size_t correct = 0;

    [[nodiscard]] std::optional<double> accuracy() const
    {
        if (n == 0) {
            return std::nullopt;
        }
        return static_cast<double>(correct) / static_cast<double>(n);
    }

    void add(bool ok)
    {
        ++n;
        correct += ok ? 1 : 0;
    }
};

struct VocabSplit
{
    SplitAccuracy high_overlap;
    SplitAccuracy low_overlap;
};

struct PhraseSplit
{
    SplitAccuracy with_phrase;
    SplitAccuracy without_phrase;
};

/// True when the correct option's word-form Jaccard index against the
/// material is positive and at least 1.5 times that of every confounder.
/// Empty for items without a correct option.
inline std::optional<bool> high_overlap(corpus::McqItem const & item)
{
    if (!item.gold_index || *item.gold_index >= item.options.size()) {
        return std::nullopt;
    }
    double const gold = lexmetrics::jaccard_wordforms(item.options[*item.gold_index], item.material_text);
    if (gold <= 0.0) {
        return false;
    }
    for (std::size_t i = 0; i < item.options.size(); ++i) {
        if (i != *item.gold_index
            && gold < 1.5 * lexmetrics::jaccard_wordforms(item.options[i], item.material_text)) {
            return false;
        }
    }
    return true;
}

/// The explanation that decides the item: the material when options are
/// statements, otherwise the correct option.
inline std::optional<std::string> relevant_explanation(corpus::McqItem const & item)
{
    if (!item.gold_index || *item.gold_index >= item.options.size()) {
        return std::nullopt;
    }
    if (item.mode == corpus::McqMode::determine_statement) {
        return item.material_text;
    }
    return item.options[*item.gold_index];
}

inline std::optional<bool> has_verdict_phrase(corpus::McqItem const & item)
{
    auto const text = relevant_explanation(item);
    if (!text) {
        return std::nullopt;
    }
    return text->find("as true") != std::string::npos || text->find("as untrue") != std::string::npos;
}

/// Whether the prediction names the correct option letter.
inline bool letter_correct(corpus::McqItem const & item, std::string const & prediction)
{
    auto const parsed = corpus::parse_mcq_answer(prediction);
    if (!parsed || !parsed->letter || !item.gold_index) {
        return false;
    }
    return *parsed->letter == corpus::option_letter(*item.gold_index);
}

/// Whether the prediction states the correct truthfulness.
inline bool verdict_correct(corpus::McqItem const & item, std::string const & prediction)
{
    auto const parsed = corpus::parse_mcq_answer(prediction);
    if (!parsed || !item.gold_index) {
        return false;
    }
    bool const gold_true = item.gold_answer.rfind("TRUE", 0) == 0;
    return parsed->kind == (gold_true ? corpus::McqAnswer::Kind::true_ : corpus::McqAnswer::Kind::false_);
}

/// Whether the prediction matches the gold answer in full (verdict and
/// letter, or UNKNOWABLE).
inline bool answer_correct(corpus::McqItem const & item, std::string const & prediction)
{
    auto const parsed = corpus::parse_mcq_answer(prediction);
    if (!parsed || item.gold_answer.empty()) {
        return false;
    }
    if (!item.gold_index) {
        return parsed->kind == corpus::McqAnswer::Kind::unknowable;
    }
    return verdict_correct(item, prediction) && letter_correct(item, prediction);
}

namespace detail {

inline void check_aligned(std::vector<corpus::McqItem> const & items, std::vector<std::string> const & predictions)
{
    if (items.size() != predictions.size()) {
        throw ArgumentError("analysis: items and predictions are not aligned");
    }
}

} // namespace detail

/// Letter accuracy on items with high vs low vocabulary overlap between the
/// correct option and the material. Items without a correct option are
/// left out.
inline VocabSplit analysis_vocab_split(std::vector<corpus::McqItem> const & items,
                                       std::vector<std::string> const & predictions)
{
    detail::check_aligned(items, predictions);
    VocabSplit out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto const high = high_overlap(items[i]);
        if (!high) {
            continue;
        }
        (*high ? out.high_overlap : out.low_overlap).add(letter_correct(items[i], predictions[i]));
    }
    return out;
}

/// Truthfulness accuracy on items whose deciding explanation contains the
/// literal "as true" or "as untrue" vs items where it does not.
inline PhraseSplit analysis_verdict_phrase(std::vector<corpus::McqItem> const & items,
                                           std::vector<std::string> const & predictions)
{
    detail::check_aligned(items, predictions);
    PhraseSplit out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto const phrase = has_verdict_phrase(items[i]);
        if (!phrase) {
            continue;
        }
        (*phrase ? out.with_phrase : out.without_phrase).add(verdict_correct(items[i], predictions[i]));
    }
    return out;
}

} // namespace sensemaker::report
