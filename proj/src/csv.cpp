// csv.cpp: CSV formatting, writing and reading

#include "dho/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "dho/errors.hpp"

namespace dho {

namespace {

std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

// RFC 4180 split of one record (no embedded newlines are produced by this writer).
std::vector<std::string> split_record(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ConfigError("unterminated quoted field", line_no, "");
    fields.push_back(std::move(cur));
    return fields;
}

double parse_double(const std::string& s, int line_no, const std::string& key) {
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("not a number: '" + s + "'", line_no, key);
    return v;
}

} // namespace

void CsvTable::add_row(std::vector<double> row) {
    if (row.size() != header.size()) throw DomainError("csv: row width does not match header");
    rows.push_back(std::move(row));
}

void CsvTable::add_row(std::string label, std::vector<double> row) {
    if (label_header.empty()) throw DomainError("csv: table has no label column");
    add_row(std::move(row));
    labels.push_back(std::move(label));
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw DomainError("csv: no column '" + name + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const CsvTable& table) {
    const bool labelled = !table.label_header.empty();
    if (labelled) os << quote_field(table.label_header);
    for (std::size_t i = 0; i < table.header.size(); ++i)
        os << (i || labelled ? "," : "") << quote_field(table.header[i]);
    os << '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (labelled) os << quote_field(table.labels.at(r));
        for (std::size_t i = 0; i < row.size(); ++i) os << (i || labelled ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_csv(os, table);
    if (!os) throw Error("write to '" + path + "' failed");
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream os;
    write_csv(os, table);
    return os.str();
}

CsvTable read_csv(std::istream& is, bool labelled) {
    CsvTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_record(line, line_no);
        if (table.header.empty()) {
            if (labelled) {
                table.label_header = fields.front();
                fields.erase(fields.begin());
            }
            table.header = std::move(fields);
            if (table.header.empty()) throw ConfigError("header has no numeric columns", line_no, "");
            continue;
        }
        const std::size_t width = table.header.size() + (labelled ? 1 : 0);
        if (fields.size() != width)
            throw ConfigError("expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()),
                              line_no, "");
        if (labelled) {
            table.labels.push_back(fields.front());
            fields.erase(fields.begin());
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) row.push_back(parse_double(fields[i], line_no, table.header[i]));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ConfigError("empty table", 0, "");
    return table;
}

CsvTable read_csv_file(const std::string& path, bool labelled) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open '" + path + "'");
    return read_csv(is, labelled);
}

} // namespace dho
