#pragma once

#include "orblab/types.hpp"

#include <string>
#include <vector>

namespace orblab {

/// RFC-4180 style writer: CRLF records, mandatory header, '.' decimal.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& fields);
    void close();

    static std::string num(Scalar v);       ///< shortest round-trip decimal
    static std::string integer(long long v);

private:
    void* file_ = nullptr;
    bool wrote_header_ = false;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int column(const std::string& name) const;  ///< -1 when absent
};

/// Reads a CSV produced by CsvWriter (accepts LF or CRLF); requires a
/// header row and rectangular data.
CsvTable read_csv(const std::string& path);

/// All fields parsed as numbers, column major; throws on non-numeric data.
std::vector<std::vector<Scalar>> numeric_columns(const CsvTable& table);

} // namespace orblab
