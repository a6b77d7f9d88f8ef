#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/text.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sensemaker::lexmetrics {

/// Lowercase alphanumeric tokens; any run of other characters separates.
inline std::vector<std::string> tokenize(std::string_view text)
{
    return alnum_tokens(text);
}

/// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) memory.
template <typename T>
std::size_t lcs_length(std::vector<T> const & a, std::vector<T> const & b)
{
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct RougeL
{
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

/// Single-sequence ROUGE-L over whole texts.
inline RougeL rouge_l(std::string_view reference, std::string_view candidate)
{
    auto const ref = tokenize(reference);
    if (ref.empty()) {
        throw ArgumentError("rouge_l: reference has no tokens");
    }
    auto const cand = tokenize(candidate);
    RougeL out;
    if (cand.empty()) {
        return out;
    }
    auto const lcs = static_cast<double>(lcs_length(ref, cand));
    out.recall = lcs / static_cast<double>(ref.size());
    out.precision = lcs / static_cast<double>(cand.size());
    if (lcs > 0.0) {
        out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
}

inline double rouge_l_recall(std::string_view reference, std::string_view candidate)
{
    return rouge_l(reference, candidate).recall;
}

inline double rouge_l_f1(std::string_view reference, std::string_view candidate)
{
    return rouge_l(reference, candidate).f1;
}

/// Jaccard index of the two texts' word-form sets.
inline double jaccard_wordforms(std::string_view a, std::string_view b)
{
    auto const ta = tokenize(a);
    auto const tb = tokenize(b);
    std::set<std::string> const sa(ta.begin(), ta.end());
    std::set<std::string> const sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) {
        throw ArgumentError("jaccard_wordforms: both texts have no tokens");
    }
    std::size_t common = 0;
    for (auto const & t : sa) {
        common += sb.count(t);
    }
    auto const uni = sa.size() + sb.size() - common;
    return static_cast<double>(common) / static_cast<double>(uni);
}

} // namespace sensemaker::lexmetrics
