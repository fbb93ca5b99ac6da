#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazeflow {

// Derived tables: 6 significant digits, ties to even. Missing values are "NA".
std::string format_number(double value);
std::string format_number(const std::optional<double>& value);
// Shortest representation that parses back to the same double.
std::string format_exact(double value);

// Strict decimal parse of a whole field; std::nullopt on garbage.
std::optional<double> parse_number(std::string_view field);

/// A parsed CSV document. Fields may be double-quoted; the first line is the header.
class CsvTable {
public:
    struct Row {
        std::size_t line = 0;  // 1-based source line
        std::vector<std::string> fields;
    };

    static CsvTable parse(std::string_view text);

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }
    bool empty() const { return header_.empty(); }

    // Index of a named column; throws InputError naming the column when absent.
    std::size_t require(std::string_view column) const;
    std::optional<std::size_t> find(std::string_view column) const;

    // Typed field access; errors carry the row's line number.
    double number(const Row& row, std::size_t column) const;
    std::optional<double> optional_number(const Row& row, std::size_t column) const;
    long long integer(const Row& row, std::size_t column) const;

private:
    std::vector<std::string> header_;
    std::vector<Row> rows_;
};

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    CsvWriter& header(std::initializer_list<std::string_view> columns);
    CsvWriter& field(std::string_view text);
    CsvWriter& field(const char* text) { return field(std::string_view(text)); }
    CsvWriter& field(const std::string& text) { return field(std::string_view(text)); }
    CsvWriter& field(double value) { return field(format_number(value)); }
    CsvWriter& field(const std::optional<double>& value) { return field(format_number(value)); }
    CsvWriter& field(long long value);
    CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
    CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
    CsvWriter& field(bool value) { return field(static_cast<long long>(value ? 1 : 0)); }
    CsvWriter& exact(double value) { return field(format_exact(value)); }
    void end_row();

private:
    std::ostream& out_;
    bool first_ = true;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

} // namespace gazeflow
