#pragma once

#include <stdexcept>
#include <string>

namespace sensemaker {

/// Base class for all errors raised by the harness. The category selects the
/// process exit code used by the command-line tool.
class Error : public std::runtime_error
{
public:
    enum class Category { argument, config, provider, data };

    Error(Category category, std::string const & what)
    : std::runtime_error(what)
    , category_(category)
    {}

    [[nodiscard]] Category category() const noexcept { return category_; }

private:
    Category category_;
};

/// Violated function precondition (bad argument values or shapes).
class ArgumentError : public Error
{
public:
    explicit ArgumentError(std::string const & what)
    : Error(Category::argument, what)
    {}
};

class ConfigError : public Error
{
public:
    explicit ConfigError(std::string const & what)
    : Error(Category::config, what)
    {}
};

/// Failure of an embedding or chat provider (transport, HTTP status, payload).
class ProviderError : public Error
{
public:
    explicit ProviderError(std::string const & what)
    : Error(Category::provider, what)
    {}
};

/// Malformed or inconsistent input data.
class DataError : public Error
{
public:
    explicit DataError(std::string const & what)
    : Error(Category::data, what)
    {}
};

/// Schema violation in an input file. Carries the location of the offence.
class LoadError : public DataError
{
public:
    LoadError(std::string file, std::size_t line, std::string field, std::string const & reason)
    : DataError(file + ":" + std::to_string(line) + ": field '" + field + "': " + reason)
    , file_(std::move(file))
    , line_(line)
    , field_(std::move(field))
    {}

    [[nodiscard]] std::string const & file() const noexcept { return file_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::string const & field() const noexcept { return field_; }

private:
    std::string file_;
    std::size_t line_;
    std::string field_;
};

/// Cross-reference between records that cannot be resolved.
class ReferenceError : public DataError
{
public:
    explicit ReferenceError(std::string const & what)
    : DataError(what)
    {}
};

/// Raised when a quantity is requested from a degenerate (all-zero) distribution.
class DegenerateError : public Error
{
public:
    explicit DegenerateError(std::string const & what)
    : Error(Category::argument, what)
    {}
};

} // namespace sensemaker
