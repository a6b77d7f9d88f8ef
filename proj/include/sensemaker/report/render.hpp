#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/jsonl.hpp"
#include "sensemaker/report/table.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace sensemaker::report {

namespace fs = std::filesystem;

enum class Format { markdown, jsonl, csv };

inline constexpr char const * tables_record = "tables";
inline constexpr char const * notes_record = "notes";

namespace detail {

inline std::string fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    return s == "-0.000" ? "0.000" : s;
}

inline std::string md_escape(std::string const & s)
{
    std::string out;
    for (char c : s) {
        if (c == '|') {
            out += "\\|";
        } else if (c == '\n') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

inline std::string csv_field(std::string const & s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

inline void write_file(fs::path const & path, std::string const & text)
{
    if (!path.parent_path().empty()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << text;
    out.flush();
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

inline std::vector<Table const *> sorted_tables(RunReport const & report)
{
    std::vector<Table const *> out;
    for (auto const & t : report.tables) {
        out.push_back(&t);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](Table const * a, Table const * b) { return a->spec.name < b->spec.name; });
    return out;
}

inline json table_to_json(Table const & t)
{
    json rows = json::array();
    for (auto const & r : t.rows) {
        rows.push_back({{"keys", r.keys},
                        {"n", r.cell.n},
                        {"mean", r.cell.mean},
                        {"std", r.cell.std ? json(*r.cell.std) : json(nullptr)}});
    }
    return {{"name", t.spec.name},
            {"title", t.spec.title},
            {"source", t.spec.source},
            {"key_columns", t.spec.key_columns},
            {"value_field", t.spec.value_field},
            {"statistic", t.spec.statistic},
            {"filter", t.spec.filter},
            {"rows", std::move(rows)},
            {"notes", t.notes}};
}

inline Table table_from_json(json const & j)
{
    Table t;
    t.spec.name = j.at("name").get<std::string>();
    t.spec.title = j.at("title").get<std::string>();
    t.spec.source = j.at("source").get<std::string>();
    t.spec.key_columns = j.at("key_columns").get<std::vector<std::string>>();
    t.spec.value_field = j.at("value_field").get<std::string>();
    t.spec.statistic = j.at("statistic").get<std::string>();
    t.spec.filter = j.at("filter");
    for (auto const & r : j.at("rows")) {
        Row row;
        row.keys = r.at("keys").get<std::vector<std::string>>();
        row.cell.n = r.at("n").get<std::size_t>();
        row.cell.mean = r.at("mean").get<double>();
        if (!r.at("std").is_null()) {
            row.cell.std = r.at("std").get<double>();
        }
        t.rows.push_back(std::move(row));
    }
    t.notes = j.at("notes").get<std::vector<std::string>>();
    return t;
}

} // namespace detail

/// The whole report as one markdown document.
inline std::string to_markdown(RunReport const & report)
{
    std::ostringstream out;
    out << "# Run report\n";
    for (auto const & note : report.notes) {
        out << "\n> " << detail::md_escape(note) << "\n";
    }
    for (auto const * t : detail::sorted_tables(report)) {
        out << "\n## " << detail::md_escape(t->spec.title) << "\n\n";
        out << "Table `" << t->spec.name << "`, computed from `records/" << t->spec.source << ".jsonl` ("
            << t->spec.statistic << " of `" << t->spec.value_field << "`";
        if (!t->spec.filter.empty()) {
            out << " where `" << t->spec.filter.dump() << "`";
        }
        out << ").\n\n|";
        for (auto const & c : t->spec.key_columns) {
            out << ' ' << detail::md_escape(c) << " |";
        }
        bool const is_mean = t->spec.statistic == "mean";
        out << (is_mean ? " n | mean | std |\n|" : " n | r |\n|");
        for (std::size_t i = 0; i < t->spec.key_columns.size() + (is_mean ? 3 : 2); ++i) {
            out << (i < t->spec.key_columns.size() ? "---|" : "---:|");
        }
        out << '\n';
        for (auto const & r : t->rows) {
            out << '|';
            for (auto const & k : r.keys) {
                out << ' ' << detail::md_escape(k) << " |";
            }
            out << ' ' << r.cell.n << " | " << detail::fixed(r.cell.mean) << " |";
            if (is_mean) {
                out << ' ' << (r.cell.std ? detail::fixed(*r.cell.std) : std::string("n/a")) << " |";
            }
            out << '\n';
        }
        if (t->rows.empty()) {
            out << "\nNo rows.\n";
        }
        for (auto const & note : t->notes) {
            out << "\n- " << detail::md_escape(note);
        }
        if (!t->notes.empty()) {
            out << '\n';
        }
    }
    return out.str();
}

/// One table as CSV with full-precision numbers.
inline std::string to_csv(Table const & t)
{
    std::ostringstream out;
    for (auto const & c : t.spec.key_columns) {
        out << detail::csv_field(c) << ',';
    }
    out << "n,mean,std\n";
    for (auto const & r : t.rows) {
        for (auto const & k : r.keys) {
            out << detail::csv_field(k) << ',';
        }
        out << r.cell.n << ',' << json(r.cell.mean).dump() << ',' << (r.cell.std ? json(*r.cell.std).dump() : "")
            << '\n';
    }
    return out.str();
}

/// Writes the report in one format under `dir`: report.md, tables/*.csv, or
/// records/*.jsonl (every record set, the tables, and the notes).
inline void render_report(RunReport const & report, fs::path const & dir, Format format)
{
    switch (format) {
    case Format::markdown: detail::write_file(dir / "report.md", to_markdown(report)); break;
    case Format::csv:
        for (auto const * t : detail::sorted_tables(report)) {
            detail::write_file(dir / "tables" / (t->spec.name + ".csv"), to_csv(*t));
        }
        break;
    case Format::jsonl: {
        fs::create_directories(dir / "records");
        std::vector<json> tables;
        for (auto const * t : detail::sorted_tables(report)) {
            tables.push_back(detail::table_to_json(*t));
        }
        jsonl::write(dir / "records" / (std::string(tables_record) + ".jsonl"), tables);
        std::vector<json> notes;
        for (auto const & n : report.notes) {
            notes.push_back({{"note", n}});
        }
        jsonl::write(dir / "records" / (std::string(notes_record) + ".jsonl"), notes);
        for (auto const & [name, records] : report.records) {
            if (name == tables_record || name == notes_record) {
                throw ArgumentError("render_report: record set name '" + name + "' is reserved");
            }
            jsonl::write(dir / "records" / (name + ".jsonl"), records);
        }
        break;
    }
    }
}

inline void render_report(RunReport const & report, fs::path const & dir)
{
    render_report(report, dir, Format::markdown);
    render_report(report, dir, Format::csv);
    render_report(report, dir, Format::jsonl);
}

/// Reads back what render_report wrote in jsonl format. Tables come back in
/// name order.
inline RunReport read_report(fs::path const & dir)
{
    RunReport report;
    auto const records_dir = dir / "records";
    for (auto const & line : jsonl::read(records_dir / (std::string(tables_record) + ".jsonl"))) {
        try {
            report.tables.push_back(detail::table_from_json(line.value));
        } catch (json::exception const & e) {
            throw LoadError((records_dir / "tables.jsonl").string(), line.number, "table", e.what());
        }
    }
    for (auto const & line : jsonl::read(records_dir / (std::string(notes_record) + ".jsonl"))) {
        report.notes.push_back(line.value.at("note").get<std::string>());
    }
    std::vector<fs::path> files;
    for (auto const & entry : fs::directory_iterator(records_dir)) {
        if (entry.path().extension() == ".jsonl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (auto const & f : files) {
        auto const name = f.stem().string();
        if (name == tables_record || name == notes_record) {
            continue;
        }
        auto & records = report.records[name];
        for (auto & line : jsonl::read(f)) {
            records.push_back(std::move(line.value));
        }
    }
    return report;
}

} // namespace sensemaker::report
