#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/stats.hpp"
#include "sensemaker/lexmetrics/pearson.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sensemaker::report {

using nlohmann::json;

/// One table cell. `std` is absent for statistics that are not means.
struct Cell
{
    std::size_t n = 0;
    double mean = 0.0;
    std::optional<double> std;

    friend bool operator==(Cell const &, Cell const &) = default;
};

struct Row
{
    std::vector<std::string> keys;
    Cell cell;

    friend bool operator==(Row const &, Row const &) = default;
};

/// How to derive a table from a record set.
///
/// statistic "mean": records are grouped by key_columns and value_field is
/// averaged. Records whose value is null or absent are skipped.
/// statistic "pearson": value_field names two comma-separated fields and the
/// cell holds their correlation.
/// `filter` maps a field to an allowed value or an array of allowed values.
struct TableSpec
{
    std::string name;
    std::string title;
    std::string source;
    std::vector<std::string> key_columns;
    std::string value_field;
    std::string statistic = "mean";
    json filter = json::object();

    friend bool operator==(TableSpec const &, TableSpec const &) = default;
};

struct Table
{
    TableSpec spec;
    std::vector<Row> rows;
    std::vector<std::string> notes;

    friend bool operator==(Table const &, Table const &) = default;
};

/// All tables of a run plus the per-item records they were computed from.
struct RunReport
{
    std::vector<Table> tables;
    std::map<std::string, std::vector<json>> records;
    std::vector<std::string> notes;

    friend bool operator==(RunReport const &, RunReport const &) = default;

    [[nodiscard]] Table const * find(std::string const & name) const
    {
        for (auto const & t : tables) {
            if (t.spec.name == name) {
                return &t;
            }
        }
        return nullptr;
    }
};

/// Text form of a key field: strings verbatim, null as empty, anything else
/// in JSON notation.
inline std::string key_text(json const & v)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_null()) {
        return "";
    }
    return v.dump();
}

inline bool passes(json const & record, json const & filter)
{
    for (auto const & [field, allowed] : filter.items()) {
        auto it = record.find(field);
        if (it == record.end()) {
            return false;
        }
        if (allowed.is_array()) {
            if (std::find(allowed.begin(), allowed.end(), *it) == allowed.end()) {
                return false;
            }
        } else if (*it != allowed) {
            return false;
        }
    }
    return true;
}

namespace detail {

inline std::optional<double> number_at(json const & record, std::string const & field)
{
    auto it = record.find(field);
    if (it == record.end() || !it->is_number()) {
        return std::nullopt;
    }
    return it->get<double>();
}

inline std::string describe(std::vector<std::string> const & columns, std::vector<std::string> const & keys)
{
    std::string out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i != 0) {
            out += ", ";
        }
        out += columns[i] + "=" + keys[i];
    }
    return out.empty() ? "(all)" : out;
}

} // namespace detail

/// Computes a table from records. Rows are sorted by key; values inside a
/// group are sorted before summing, so the result does not depend on record
/// order. Groups without a usable value are omitted and noted.
inline Table tabulate(TableSpec const & spec, std::vector<json> const & records)
{
    Table t{spec, {}, {}};
    std::map<std::vector<std::string>, std::vector<double>> groups;
    std::map<std::vector<std::string>, std::vector<std::pair<double, double>>> pairs;
    std::string x_field;
    std::string y_field;
    if (spec.statistic == "pearson") {
        auto const comma = spec.value_field.find(',');
        if (comma == std::string::npos) {
            throw ArgumentError("tabulate: pearson tables need two value fields");
        }
        x_field = spec.value_field.substr(0, comma);
        y_field = spec.value_field.substr(comma + 1);
    } else if (spec.statistic != "mean") {
        throw ArgumentError("tabulate: unknown statistic '" + spec.statistic + "'");
    }

    for (auto const & r : records) {
        if (!passes(r, spec.filter)) {
            continue;
        }
        std::vector<std::string> keys;
        keys.reserve(spec.key_columns.size());
        for (auto const & c : spec.key_columns) {
            auto it = r.find(c);
            keys.push_back(it == r.end() ? std::string() : key_text(*it));
        }
        if (spec.statistic == "mean") {
            auto & g = groups[keys];
            if (auto v = detail::number_at(r, spec.value_field)) {
                g.push_back(*v);
            }
        } else {
            auto & g = pairs[keys];
            auto x = detail::number_at(r, x_field);
            auto y = detail::number_at(r, y_field);
            if (x && y) {
                g.emplace_back(*x, *y);
            }
        }
    }

    for (auto & [keys, values] : groups) {
        if (values.empty()) {
            t.notes.push_back("omitted " + detail::describe(spec.key_columns, keys) + ": no valid values");
            continue;
        }
        std::sort(values.begin(), values.end());
        auto const s = summarize(values);
        t.rows.push_back({keys, {s.n, s.mean, s.std}});
    }
    for (auto & [keys, values] : pairs) {
        std::sort(values.begin(), values.end());
        std::vector<double> xs;
        std::vector<double> ys;
        for (auto const & [x, y] : values) {
            xs.push_back(x);
            ys.push_back(y);
        }
        try {
            t.rows.push_back({keys, {xs.size(), lexmetrics::pearson(xs, ys), std::nullopt}});
        } catch (ArgumentError const &) {
            t.notes.push_back("omitted " + detail::describe(spec.key_columns, keys) + ": correlation undefined for "
                              + std::to_string(xs.size()) + " items");
        }
    }
    return t;
}

/// Mean and population std of ratings per group. Records carry the group
/// fields and a numeric (already rescued) rating, or null when invalid.
inline Table mean_rating_by_group(std::vector<json> const & ratings,
                                  std::vector<std::string> const & group_by,
                                  std::string const & name = "mean_rating",
                                  std::string const & rating_field = "rating")
{
    TableSpec spec;
    spec.name = name;
    spec.title = "Mean rating";
    spec.source = name;
    spec.key_columns = group_by;
    spec.value_field = rating_field;
    return tabulate(spec, ratings);
}

/// Adds a table computed from records stored in the report under
/// spec.source.
inline Table const & add_table(RunReport & report, TableSpec spec)
{
    auto it = report.records.find(spec.source);
    static std::vector<json> const none;
    auto const & records = it == report.records.end() ? none : it->second;
    report.tables.push_back(tabulate(spec, records));
    return report.tables.back();
}

} // namespace sensemaker::report
