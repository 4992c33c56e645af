#include "driftwatch/csv.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace driftwatch {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("csv: missing required column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open file: " + path.string());

    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (line_no == 1) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size())
            throw std::runtime_error("csv: row " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw std::runtime_error("csv: empty file: " + path.string());
    return table;
}

double parse_numeric_cell(const CsvTable& table, std::size_t row, std::size_t col) {
    const std::string& cell = table.rows[row][col];
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw std::runtime_error("csv: non-numeric cell at row " + std::to_string(row + 2) +
                                 ", column '" + table.header[col] + "': '" + cell + "'");
    return value;
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("csv: cannot open file for writing: " + path.string());
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

}  // namespace driftwatch
