// csv.hpp: numeric CSV tables (header row, LF endings, 17 significant digits, nan)
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dho {

struct CsvTable {
    // Optional leading text column (e.g. a variant name); empty means none.
    std::string label_header;
    std::vector<std::string> labels;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Throws DomainError if the row width does not match the header.
    void add_row(std::vector<double> row);
    void add_row(std::string label, std::vector<double> row);
    std::size_t column(const std::string& name) const;  // throws DomainError if missing
};

// Shortest text that reads back bit-exactly at 17 significant digits; NaN prints as "nan".
std::string format_double(double v);

void write_csv(std::ostream& os, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
std::string to_csv(const CsvTable& table);

// Throws ConfigError (line, column name) on malformed input.
// With labelled = true the first column is read back as text.
CsvTable read_csv(std::istream& is, bool labelled = false);
CsvTable read_csv_file(const std::string& path, bool labelled = false);

} // namespace dho
