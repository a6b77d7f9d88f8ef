#pragma once

#include "sensemaker/common/error.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sensemaker::jsonl {

using nlohmann::json;

/// One parsed line of a JSONL file, with its 1-based line number.
struct Line
{
    std::size_t number = 0;
    json value;
};

/// Reads a JSONL file. Blank lines are skipped. Every other line must parse
/// as a JSON object.
inline std::vector<Line> read(std::filesystem::path const & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::vector<Line> out;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        if (!text.empty() && text.back() == '\r') {
            text.pop_back();
        }
        if (text.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        json value;
        try {
            value = json::parse(text);
        } catch (json::parse_error const & e) {
            throw LoadError(path.string(), number, "<line>", std::string("invalid JSON: ") + e.what());
        }
        if (!value.is_object()) {
            throw LoadError(path.string(), number, "<line>", "expected a JSON object");
        }
        out.push_back({number, std::move(value)});
    }
    return out;
}

inline void write(std::filesystem::path const & path, std::vector<json> const & records)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    for (auto const & r : records) {
        out << r.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
}

/// Field accessors that report schema violations with file/line/field.
class FieldReader
{
public:
    FieldReader(std::string file, Line const & line)
    : file_(std::move(file))
    , line_(line)
    {}

    [[nodiscard]] std::string string(char const * field) const
    {
        auto const & v = require(field);
        if (!v.is_string()) {
            fail(field, "expected a string");
        }
        return v.get<std::string>();
    }

    [[nodiscard]] std::string non_empty_string(char const * field) const
    {
        auto s = string(field);
        if (s.find_first_not_of(" \t\r\n") == std::string::npos) {
            fail(field, "must not be empty");
        }
        return s;
    }

    [[nodiscard]] std::optional<std::string> optional_string(char const * field) const
    {
        auto it = line_.value.find(field);
        if (it == line_.value.end() || it->is_null()) {
            return std::nullopt;
        }
        if (!it->is_string()) {
            fail(field, "expected a string or null");
        }
        return it->get<std::string>();
    }

    [[nodiscard]] double number(char const * field) const
    {
        auto const & v = require(field);
        if (!v.is_number()) {
            fail(field, "expected a number");
        }
        return v.get<double>();
    }

    [[nodiscard]] std::size_t index(char const * field) const
    {
        auto const & v = require(field);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            fail(field, "expected a non-negative integer");
        }
        return v.get<std::size_t>();
    }

    [[nodiscard]] json const & array(char const * field) const
    {
        auto const & v = require(field);
        if (!v.is_array()) {
            fail(field, "expected an array");
        }
        return v;
    }

    [[nodiscard]] json const & require(char const * field) const
    {
        auto it = line_.value.find(field);
        if (it == line_.value.end()) {
            fail(field, "missing");
        }
        return *it;
    }

    [[noreturn]] void fail(std::string const & field, std::string const & reason) const
    {
        throw LoadError(file_, line_.number, field, reason);
    }

    [[nodiscard]] std::size_t line_number() const noexcept { return line_.number; }
    [[nodiscard]] std::string const & file() const noexcept { return file_; }

private:
    std::string file_;
    Line const & line_;
};

} // namespace sensemaker::jsonl
