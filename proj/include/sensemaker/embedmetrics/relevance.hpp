#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace sensemaker::embedmetrics {

using Vector = std::vector<double>;

/// Cosine similarity of two equal-length, non-zero vectors, clamped to [-1, 1].
inline double cosine(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size()) {
        throw ArgumentError("cosine: dimension mismatch");
    }
    double xy = 0.0;
    double xx = 0.0;
    double yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xy += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx == 0.0 || yy == 0.0) {
        throw ArgumentError("cosine: undefined for a zero vector");
    }
    return std::clamp(xy / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
}

/// Empirical quantile with linear interpolation between order statistics
/// (position (n - 1) * prob in the sorted sample).
inline double quantile(std::vector<double> sample, double prob)
{
    if (sample.empty()) {
        throw ArgumentError("quantile of an empty sample");
    }
    std::sort(sample.begin(), sample.end());
    double const pos = prob * static_cast<double>(sample.size() - 1);
    auto const lo = static_cast<std::size_t>(std::floor(pos));
    auto const hi = std::min(lo + 1, sample.size() - 1);
    double const frac = pos - static_cast<double>(lo);
    return sample[lo] + frac * (sample[hi] - sample[lo]);
}

/// |Q| x |W| cosine similarities between question and window embeddings.
inline Matrix similarity_matrix(std::vector<Vector> const & questions, std::vector<Vector> const & windows)
{
    Matrix s(questions.size(), windows.size());
    for (std::size_t q = 0; q < questions.size(); ++q) {
        for (std::size_t w = 0; w < windows.size(); ++w) {
            s(q, w) = cosine(questions[q], windows[w]);
        }
    }
    return s;
}

/// Thresholded relevance. For each window column, a similarity strictly
/// above the column's 0.95 quantile keeps its value plus the column median,
/// floored at zero; everything else becomes zero.
inline Matrix relevance_matrix(Matrix const & sims)
{
    if (sims.rows() < 1 || sims.cols() < 1) {
        throw ArgumentError("relevance_matrix: need at least one question and one window");
    }
    Matrix r(sims.rows(), sims.cols());
    for (std::size_t w = 0; w < sims.cols(); ++w) {
        auto const column = sims.column(w);
        double const median = quantile(column, 0.5);
        double const upper = quantile(column, 0.95);
        for (std::size_t q = 0; q < sims.rows(); ++q) {
            double const s = sims(q, w);
            r(q, w) = s > upper ? std::max(0.0, s + median) : 0.0;
        }
    }
    return r;
}

struct JointDistribution
{
    Matrix p;
    bool degenerate = false;
};

/// Normalizes relevance into a joint distribution over Q x W. A zero total
/// marks the result degenerate and leaves p empty.
inline JointDistribution joint_distribution(Matrix const & r)
{
    double total = 0.0;
    for (double v : r.values()) {
        if (v < 0.0) {
            throw ArgumentError("joint_distribution: negative relevance");
        }
        total += v;
    }
    JointDistribution out;
    if (total == 0.0) {
        out.degenerate = true;
        return out;
    }
    out.p = Matrix(r.rows(), r.cols());
    for (std::size_t q = 0; q < r.rows(); ++q) {
        for (std::size_t w = 0; w < r.cols(); ++w) {
            out.p(q, w) = r(q, w) / total;
        }
    }
    return out;
}

inline double relevance_score(Matrix const & r)
{
    double total = 0.0;
    for (double v : r.values()) {
        total += v;
    }
    return total;
}

/// Marginal of the joint distribution over windows.
inline Vector window_marginal(Matrix const & p)
{
    Vector m(p.cols(), 0.0);
    for (std::size_t q = 0; q < p.rows(); ++q) {
        for (std::size_t w = 0; w < p.cols(); ++w) {
            m[w] += p(q, w);
        }
    }
    return m;
}

/// Shannon entropy in bits; zero-probability terms contribute nothing.
inline double entropy_bits(std::span<double const> dist)
{
    double h = 0.0;
    for (double x : dist) {
        if (x > 0.0) {
            h -= x * std::log2(x);
        }
    }
    return h;
}

/// KL(p || q) in bits. q must be positive wherever p is.
inline double kl_divergence_bits(std::span<double const> p, std::span<double const> q)
{
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            d += p[i] * std::log2(p[i] / q[i]);
        }
    }
    return d;
}

/// Entropy (bits) of the window marginal.
inline double coverage_score(JointDistribution const & joint)
{
    if (joint.degenerate) {
        throw DegenerateError("coverage undefined for a degenerate joint distribution; "
                              "score the question set as (0, 0, 0)");
    }
    auto const m = window_marginal(joint.p);
    return entropy_bits(m);
}

/// Per-question conditional distributions over windows. A row with zero
/// mass becomes uniform.
inline std::vector<Vector> conditionals(Matrix const & p)
{
    std::vector<Vector> out(p.rows(), Vector(p.cols(), 0.0));
    for (std::size_t q = 0; q < p.rows(); ++q) {
        double row_sum = 0.0;
        for (double v : p.row(q)) {
            row_sum += v;
        }
        for (std::size_t w = 0; w < p.cols(); ++w) {
            out[q][w] = row_sum > 0.0 ? p(q, w) / row_sum : 1.0 / static_cast<double>(p.cols());
        }
    }
    return out;
}

/// Adds epsilon to every entry and renormalizes.
inline Vector smooth(Vector dist, double epsilon)
{
    double total = 0.0;
    for (double & x : dist) {
        x += epsilon;
        total += x;
    }
    for (double & x : dist) {
        x /= total;
    }
    return dist;
}

/// Sum of KL(p_q || p_q') over all ordered pairs of questions, self pairs
/// included, on epsilon-smoothed conditionals.
inline double diversity_score(JointDistribution const & joint, double epsilon)
{
    if (joint.degenerate) {
        throw DegenerateError("diversity undefined for a degenerate joint distribution; "
                              "score the question set as (0, 0, 0)");
    }
    if (!(epsilon > 0.0)) {
        throw ArgumentError("diversity_score: epsilon must be positive");
    }
    auto cond = conditionals(joint.p);
    for (auto & c : cond) {
        c = smooth(std::move(c), epsilon);
    }
    double total = 0.0;
    for (auto const & a : cond) {
        for (auto const & b : cond) {
            total += kl_divergence_bits(a, b);
        }
    }
    return total;
}

struct TeacherScore
{
    double relevance = 0.0;
    double coverage = 0.0;
    double diversity = 0.0;

    friend bool operator==(TeacherScore const &, TeacherScore const &) = default;
};

/// All intermediate quantities of the embedding-based question-set metrics.
struct RelevanceModel
{
    std::vector<Vector> question_embeddings;
    std::vector<Vector> window_embeddings;
    Matrix similarity;
    Matrix relevance;
    JointDistribution joint;
    Vector marginal_on_windows;
    std::vector<Vector> conditionals;
};

inline RelevanceModel build_relevance_model(std::vector<Vector> question_embeddings,
                                            std::vector<Vector> window_embeddings)
{
    RelevanceModel m;
    m.question_embeddings = std::move(question_embeddings);
    m.window_embeddings = std::move(window_embeddings);
    m.similarity = similarity_matrix(m.question_embeddings, m.window_embeddings);
    m.relevance = relevance_matrix(m.similarity);
    m.joint = joint_distribution(m.relevance);
    if (!m.joint.degenerate) {
        m.marginal_on_windows = window_marginal(m.joint.p);
        m.conditionals = embedmetrics::conditionals(m.joint.p);
    }
    return m;
}

/// The three question-set scores; a degenerate joint scores (0, 0, 0).
inline TeacherScore teacher_score(RelevanceModel const & m, double epsilon)
{
    if (m.joint.degenerate) {
        return {};
    }
    return {relevance_score(m.relevance), coverage_score(m.joint), diversity_score(m.joint, epsilon)};
}

} // namespace sensemaker::embedmetrics
