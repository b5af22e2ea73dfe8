// Minimal CSV reading shared by the loaders. Header row required, fields
// may be double-quoted, blank lines skipped.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evstudy::detail {

struct CsvRow {
    std::size_t line_number;
    std::vector<std::string> fields;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<CsvRow> rows;
};

std::string trim(std::string_view s);
CsvTable read_csv(std::string_view text, std::string_view source_name);
// Case-insensitive header lookup; throws DataError when absent.
std::size_t column_index(const CsvTable& table, std::string_view name, std::string_view source_name);
std::optional<double> parse_double(std::string_view text);

}  // namespace evstudy::detail
