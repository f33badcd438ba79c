#pragma once

// Minimal delimited-table reader/writer used by every ingest and report path.
// Supports comma or tab delimiters (autodetected from the header when not
// forced), '#' comment lines (collected, round-tripped), and CRLF input.
// Fields are plain tokens: none of the formats produced or consumed here embed
// delimiters inside fields, so no quoting layer is needed.

#include <iosfwd>
#include <string>
#include <vector>

namespace wft {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;   // each row has columns.size() fields
    std::vector<std::string> comments;            // '#'-lines seen before the header, sans '#'
    std::vector<std::size_t> source_lines;        // 1-based input line per data row

    /// Column index by name; -1 when absent.
    int column_index(const std::string& name) const;
};

/// Parse a delimited table.  delimiter '\0' autodetects (tab if the header
/// contains one, else comma).  Throws MalformedRow on ragged rows.
Table read_table(std::istream& in, char delimiter = '\0');

/// Write a table; comments are emitted first as "# ..." lines.
void write_table(std::ostream& out, const Table& table, char delimiter = ',');

// ---- deterministic value formatting --------------------------------------

/// Shortest round-trip-stable decimal rendering ("%.17g" fallback from "%.12g"),
/// identical across runs and platforms for the values this toolkit produces.
std::string format_double(double value);

/// Fixed decimal places ("%.*f").
std::string format_fixed(double value, int places);

/// Strict numeric parses; return false on trailing garbage or empty input.
bool parse_double(const std::string& text, double& out);
bool parse_long(const std::string& text, long long& out);

/// Strip surrounding ASCII whitespace.
std::string trim(const std::string& text);

/// Split on a single-character delimiter (no quoting).
std::vector<std::string> split(const std::string& text, char delimiter);

} // namespace wft
