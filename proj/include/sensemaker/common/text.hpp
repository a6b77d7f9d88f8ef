#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sensemaker {

/// A whitespace-delimited token with its byte offsets in the source text.
struct TokenSpan
{
    std::size_t begin = 0;
    std::size_t end = 0;
};

inline bool is_space(char c) noexcept
{
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline std::vector<TokenSpan> whitespace_spans(std::string_view text)
{
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) {
            ++i;
        }
        if (i == text.size()) {
            break;
        }
        std::size_t const begin = i;
        while (i < text.size() && !is_space(text[i])) {
            ++i;
        }
        out.push_back({begin, i});
    }
    return out;
}

inline std::vector<std::string> split_whitespace(std::string_view text)
{
    std::vector<std::string> out;
    for (auto const & s : whitespace_spans(text)) {
        out.emplace_back(text.substr(s.begin, s.end - s.begin));
    }
    return out;
}

inline std::string join(std::vector<std::string> const & parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i != 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

inline std::string trim(std::string_view text)
{
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) {
        ++b;
    }
    while (e > b && is_space(text[e - 1])) {
        --e;
    }
    return std::string(text.substr(b, e - b));
}

inline std::string to_lower_ascii(std::string_view text)
{
    std::string out(text);
    for (char & c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

/// Lowercased tokens made of maximal runs of alphanumeric characters. Bytes
/// outside ASCII are treated as word characters, so UTF-8 letters stay inside
/// their token (only ASCII is case-folded).
inline std::vector<std::string> alnum_tokens(std::string_view text)
{
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        auto const c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        out.push_back(std::move(current));
    }
    return out;
}

/// Replaces every `{{name}}` placeholder in a single pass; unknown
/// placeholders are left untouched and substituted text is not rescanned.
template <typename Lookup>
std::string render_template(std::string_view tmpl, Lookup && lookup)
{
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        auto const open = tmpl.find("{{", i);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(i));
            break;
        }
        auto const close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(i));
            break;
        }
        out.append(tmpl.substr(i, open - i));
        std::string const name(tmpl.substr(open + 2, close - open - 2));
        if (auto const * value = lookup(name)) {
            out += *value;
        } else {
            out.append(tmpl.substr(open, close + 2 - open));
        }
        i = close + 2;
    }
    return out;
}

} // namespace sensemaker
