#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rbeval {

// RFC 4180 CSV. Fields containing commas, quotes, CR or LF are quoted with
// doubled inner quotes. Rows may span physical lines inside quoted fields.
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string>& fields);

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;  // physical line where the row starts (1-based)
};

std::vector<CsvRow> parse_csv(std::string_view content);

}  // namespace rbeval
