#include "gazeflow/table.hpp"

#include "gazeflow/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gazeflow {

std::string format_number(double value)
{
    if (std::isnan(value))
        return "NA";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    // glibc printf rounds the exact binary value under the current (to-nearest-even) mode.
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6g", value);
    std::string out(buf.data());
    if (out == "-0")
        out = "0";
    return out;
}

std::string format_number(const std::optional<double>& value)
{
    return value ? format_number(*value) : std::string("NA");
}

std::string format_exact(double value)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc())
        throw InternalError("format_exact: conversion failed");
    return std::string(buf.data(), end);
}

std::optional<double> parse_number(std::string_view field)
{
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
        field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    if (field.empty())
        return std::nullopt;
    if (field.front() == '+')
        field.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        return std::nullopt;
    return value;
}

namespace {

std::vector<std::string> split_line(std::string_view line, std::size_t line_no)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            was_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted)
        throw InputError("line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.push_back(std::move(current));
    return fields;
}

bool needs_quotes(std::string_view text)
{
    return text.find_first_of(",\"\n\r") != std::string_view::npos;
}

} // namespace

CsvTable CsvTable::parse(std::string_view text)
{
    CsvTable table;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
        text.remove_prefix(3);

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        auto fields = split_line(line, line_no);
        if (table.header_.empty()) {
            table.header_ = std::move(fields);
            continue;
        }
        if (fields.size() != table.header_.size())
            throw InputError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header_.size()) + " fields, found " +
                             std::to_string(fields.size()));
        table.rows_.push_back(Row{line_no, std::move(fields)});
    }
    return table;
}

std::optional<std::size_t> CsvTable::find(std::string_view column) const
{
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == column)
            return i;
    return std::nullopt;
}

std::size_t CsvTable::require(std::string_view column) const
{
    if (auto idx = find(column))
        return *idx;
    throw InputError("schema error: missing required column '" + std::string(column) + "'");
}

double CsvTable::number(const Row& row, std::size_t column) const
{
    auto value = parse_number(row.fields.at(column));
    if (!value || !std::isfinite(*value))
        throw InputError("line " + std::to_string(row.line) + ": column '" + header_.at(column) +
                         "' is not a finite number: '" + row.fields.at(column) + "'");
    return *value;
}

std::optional<double> CsvTable::optional_number(const Row& row, std::size_t column) const
{
    const std::string& field = row.fields.at(column);
    if (field.empty() || field == "NA")
        return std::nullopt;
    return number(row, column);
}

long long CsvTable::integer(const Row& row, std::size_t column) const
{
    const std::string& field = row.fields.at(column);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw InputError("line " + std::to_string(row.line) + ": column '" + header_.at(column) +
                         "' is not an integer: '" + field + "'");
    return value;
}

CsvWriter& CsvWriter::header(std::initializer_list<std::string_view> columns)
{
    for (auto column : columns)
        field(column);
    end_row();
    return *this;
}

CsvWriter& CsvWriter::field(std::string_view text)
{
    if (!first_)
        out_ << ',';
    first_ = false;
    if (needs_quotes(text)) {
        out_ << '"';
        for (char c : text) {
            if (c == '"')
                out_ << '"';
            out_ << c;
        }
        out_ << '"';
    } else {
        out_ << text;
    }
    return *this;
}

CsvWriter& CsvWriter::field(long long value)
{
    return field(std::string_view(std::to_string(value)));
}

void CsvWriter::end_row()
{
    out_ << '\n';
    first_ = true;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot open output file: " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
        throw InputError("failed writing output file: " + path);
}

} // namespace gazeflow
