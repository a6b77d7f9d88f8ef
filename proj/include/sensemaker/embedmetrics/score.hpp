#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/embedmetrics/provider.hpp"
#include "sensemaker/embedmetrics/relevance.hpp"
#include "sensemaker/embedmetrics/windows.hpp"

#include <string>
#include <vector>

namespace sensemaker::embedmetrics {

struct ScoringConfig
{
    std::size_t window_tokens = 96;
    std::size_t stride_tokens = 48;
    double epsilon = 1e-9;
};

/// Scores one question set against the text of one section: windows the
/// text, embeds windows and questions, and derives relevance, coverage and
/// diversity. An empty question set or a degenerate joint scores (0, 0, 0).
inline TeacherScore score_question_set(std::string const & section_text,
                                       std::vector<std::string> const & questions,
                                       EmbeddingProvider & provider,
                                       ScoringConfig const & config,
                                       std::string const & context = {})
{
    if (trim(section_text).empty()) {
        throw ArgumentError("score_question_set: empty section" + (context.empty() ? "" : " (" + context + ")"));
    }
    if (questions.empty()) {
        return {};
    }
    auto const windows = segment_windows(section_text, config.window_tokens, config.stride_tokens);
    std::vector<std::string> texts;
    texts.reserve(windows.size());
    for (auto const & w : windows) {
        texts.push_back(w.text);
    }

    std::vector<Vector> window_vectors;
    std::vector<Vector> question_vectors;
    try {
        window_vectors = provider.embed(texts);
        question_vectors = provider.embed(questions);
    } catch (ProviderError const & e) {
        throw ProviderError(std::string(e.what()) + " [while embedding " + std::to_string(questions.size())
                            + " questions and " + std::to_string(texts.size()) + " windows"
                            + (context.empty() ? "" : " of " + context) + "]");
    }
    if (window_vectors.size() != texts.size() || question_vectors.size() != questions.size()) {
        throw ProviderError("embedding provider returned the wrong number of vectors"
                            + (context.empty() ? "" : " for " + context));
    }
    try {
        auto const model = build_relevance_model(std::move(question_vectors), std::move(window_vectors));
        return teacher_score(model, config.epsilon);
    } catch (ArgumentError const & e) {
        throw ProviderError(std::string("unusable embeddings: ") + e.what()
                            + (context.empty() ? "" : " (" + context + ")"));
    }
}

} // namespace sensemaker::embedmetrics
