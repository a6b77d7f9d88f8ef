#pragma once

#include "sensemaker/common/error.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sensemaker::lexmetrics {

/// Rating class: 1 for [0, 33), 2 for [33, 66), 3 for [66, 100].
enum class ClassLabel : int { low = 1, mid = 2, high = 3 };

inline int to_int(ClassLabel c) { return static_cast<int>(c); }

inline ClassLabel quantize_class(double score)
{
    if (!std::isfinite(score) || score < 0.0 || score > 100.0) {
        throw ArgumentError("quantize_class: score " + std::to_string(score) + " outside [0, 100]");
    }
    if (score < 33.0) {
        return ClassLabel::low;
    }
    if (score < 66.0) {
        return ClassLabel::mid;
    }
    return ClassLabel::high;
}

/// A rating that may be missing or invalid.
using MaybeRating = std::optional<double>;

/// Fraction of items on which both raters fall into the same class, over the
/// items where both gave a valid rating.
inline double agreement_rate(std::span<MaybeRating const> a, std::span<MaybeRating const> b)
{
    if (a.size() != b.size()) {
        throw ArgumentError("agreement_rate: rating lists are not aligned");
    }
    std::size_t both = 0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i] || !b[i]) {
            continue;
        }
        ++both;
        same += quantize_class(*a[i]) == quantize_class(*b[i]) ? 1 : 0;
    }
    if (both == 0) {
        throw ArgumentError("agreement_rate: no item has a valid rating from both raters");
    }
    return static_cast<double>(same) / static_cast<double>(both);
}

inline double agreement_rate(std::vector<MaybeRating> const & a, std::vector<MaybeRating> const & b)
{
    return agreement_rate(std::span<MaybeRating const>(a), std::span<MaybeRating const>(b));
}

struct ClassAccuracy
{
    std::size_t n = 0;
    double accuracy = 0.0;
    /// Per predicted class: fraction of the evaluator's predictions of that
    /// class that match the ROUGE class. Classes never predicted are absent.
    std::map<int, double> per_class_precision;
    /// Number of predictions per class (the precision denominators).
    std::map<int, std::size_t> per_class_count;
};

/// Compares evaluator ratings (0..100) against ROUGE scores (0..1, scaled
/// by 100) after quantizing both into classes. Items with an invalid
/// evaluator rating are skipped.
inline ClassAccuracy class_accuracy(std::span<MaybeRating const> eval_scores, std::span<double const> rouge_scores)
{
    if (eval_scores.size() != rouge_scores.size()) {
        throw ArgumentError("class_accuracy: inputs are not aligned");
    }
    ClassAccuracy out;
    std::size_t correct = 0;
    std::map<int, std::size_t> hits;
    for (std::size_t i = 0; i < eval_scores.size(); ++i) {
        if (!eval_scores[i]) {
            continue;
        }
        auto const predicted = to_int(quantize_class(*eval_scores[i]));
        auto const truth = to_int(quantize_class(rouge_scores[i] * 100.0));
        ++out.n;
        ++out.per_class_count[predicted];
        if (predicted == truth) {
            ++correct;
            ++hits[predicted];
        }
    }
    if (out.n == 0) {
        throw ArgumentError("class_accuracy: no valid items");
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(out.n);
    for (auto const & [cls, count] : out.per_class_count) {
        out.per_class_precision[cls] = static_cast<double>(hits[cls]) / static_cast<double>(count);
    }
    return out;
}

inline ClassAccuracy class_accuracy(std::vector<MaybeRating> const & eval_scores,
                                    std::vector<double> const & rouge_scores)
{
    return class_accuracy(std::span<MaybeRating const>(eval_scores), std::span<double const>(rouge_scores));
}

} // namespace sensemaker::lexmetrics
