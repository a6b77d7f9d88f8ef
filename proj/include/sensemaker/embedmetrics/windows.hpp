#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/text.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sensemaker::embedmetrics {

/// A window covering whitespace tokens [start_token, end_token).
struct Window
{
    std::string text;
    std::size_t start_token = 0;
    std::size_t end_token = 0;

    friend bool operator==(Window const &, Window const &) = default;
};

using WindowSet = std::vector<Window>;

/// Slides a window of `window_tokens` whitespace tokens over `text` with step
/// `stride_tokens`. The last window is anchored to the end of the text, so
/// every token is covered. Window text is the original substring, with its
/// inner whitespace preserved.
inline WindowSet segment_windows(std::string_view text, std::size_t window_tokens, std::size_t stride_tokens)
{
    if (window_tokens < 1) {
        throw ArgumentError("window_tokens must be at least 1");
    }
    if (stride_tokens < 1 || stride_tokens > window_tokens) {
        throw ArgumentError("stride_tokens must lie in [1, window_tokens]");
    }
    auto const spans = whitespace_spans(text);
    if (spans.empty()) {
        throw ArgumentError("cannot segment empty text");
    }
    std::size_t const n = spans.size();
    auto make = [&](std::size_t begin, std::size_t end) {
        return Window{std::string(text.substr(spans[begin].begin, spans[end - 1].end - spans[begin].begin)),
                      begin, end};
    };

    WindowSet out;
    if (n <= window_tokens) {
        out.push_back(make(0, n));
        return out;
    }
    std::size_t start = 0;
    while (true) {
        out.push_back(make(start, start + window_tokens));
        if (start + window_tokens == n) {
            break;
        }
        start += stride_tokens;
        if (start + window_tokens > n) {
            start = n - window_tokens;
        }
    }
    return out;
}

} // namespace sensemaker::embedmetrics
