#include "orblab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orblab {

CsvWriter::CsvWriter(const std::string& path) {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw std::runtime_error("csv: cannot open for writing: " + path);
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
    if (file_) {
        std::fclose(static_cast<std::FILE*>(file_));
        file_ = nullptr;
    }
}

namespace {
void write_record(std::FILE* f, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const std::string& s = fields[i];
        const bool quote = s.find_first_of(",\"\r\n") != std::string::npos;
        if (quote) {
            std::fputc('"', f);
            for (char c : s) {
                if (c == '"') std::fputc('"', f);
                std::fputc(c, f);
            }
            std::fputc('"', f);
        } else {
            std::fwrite(s.data(), 1, s.size(), f);
        }
        if (i + 1 < fields.size()) std::fputc(',', f);
    }
    std::fputs("\r\n", f);
}
} // namespace

void CsvWriter::header(const std::vector<std::string>& names) {
    if (wrote_header_) throw std::logic_error("csv: header already written");
    write_record(static_cast<std::FILE*>(file_), names);
    wrote_header_ = true;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (!wrote_header_) throw std::logic_error("csv: header row must come first");
    write_record(static_cast<std::FILE*>(file_), fields);
}

std::string CsvWriter::num(Scalar v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvWriter::integer(long long v) { return std::to_string(v); }

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}
} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open: " + path);
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (table.header.empty()) {
            table.header = split_record(line);
        } else {
            std::vector<std::string> rec = split_record(line);
            if (rec.size() != table.header.size())
                throw std::runtime_error("csv: ragged row in " + path);
            table.rows.push_back(std::move(rec));
        }
    }
    if (table.header.empty()) throw std::runtime_error("csv: missing header row in " + path);
    return table;
}

std::vector<std::vector<Scalar>> numeric_columns(const CsvTable& table) {
    std::vector<std::vector<Scalar>> cols(table.header.size());
    for (const auto& row : table.rows)
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::size_t used = 0;
            Scalar v = 0;
            try {
                v = std::stod(row[c], &used);
            } catch (const std::exception&) {
                throw std::runtime_error("csv: non-numeric field '" + row[c] + "'");
            }
            if (used != row[c].size())
                throw std::runtime_error("csv: non-numeric field '" + row[c] + "'");
            cols[c].push_back(v);
        }
    return cols;
}

} // namespace orblab
