#pragma once

// Minimal CSV support for the toolkit's file interfaces: header row, comma
// separators, no embedded quoting (values here are dates and numbers).
// Parse errors carry 1-based row numbers and column names.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace driftwatch {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column; throws std::runtime_error naming the column.
    std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Numeric cell access with row/column context in error messages. `row` is
// the 0-based data row (the header is row 0 of the file).
double parse_numeric_cell(const CsvTable& table, std::size_t row, std::size_t col);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

// Line-buffered CSV writer with \n line endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    void write_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

}  // namespace driftwatch
