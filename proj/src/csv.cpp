#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "evstudy/ingest.hpp"

namespace evstudy::detail {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// RFC-4180-ish field splitting: double quotes may wrap a field and "" is an
// escaped quote. Embedded newlines are not supported.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
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
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(trim(current));
    return fields;
}

}  // namespace

CsvTable read_csv(std::string_view text, std::string_view source_name) {
    CsvTable table;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_number;
        if (trim(line).empty()) {
            if (end == text.size()) break;
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            if (line_number == 1 && !fields.empty() && fields[0].starts_with("\xEF\xBB\xBF"))
                fields[0].erase(0, 3);
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back({line_number, std::move(fields)});
        }
        if (end == text.size()) break;
    }
    if (!have_header) throw DataError(fmt::format("{}: empty file, expected a header row", source_name));
    return table;
}

std::size_t column_index(const CsvTable& table, std::string_view name, std::string_view source_name) {
    const auto wanted = lower(name);
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (lower(table.header[i]) == wanted) return i;
    throw DataError(fmt::format("{}: missing column '{}'", source_name, name));
}

std::optional<double> parse_double(std::string_view text) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace evstudy::detail
