#include "wft/csv.hpp"
#include "wft/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>

namespace wft {

int Table::column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return -1;
    return static_cast<int>(it - columns.begin());
}

std::string trim(const std::string& text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return text.substr(b, e - b);
}

std::vector<std::string> split(const std::string& text, char delimiter) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(delimiter, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace

Table read_table(std::istream& in, char delimiter) {
    Table table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (trim(line).empty()) continue;
        if (line[0] == '#') {
            if (!have_header) {
                std::string c = line.substr(1);
                if (!c.empty() && c[0] == ' ') c.erase(0, 1);
                table.comments.push_back(c);
            }
            continue;   // comments after the header are ignored, not data
        }
        if (!have_header) {
            if (delimiter == '\0')
                delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
            for (auto& c : split(line, delimiter)) table.columns.push_back(trim(c));
            if (table.columns.empty() || (table.columns.size() == 1 && table.columns[0].empty()))
                throw MalformedRow(line_no, "empty header");
            have_header = true;
            continue;
        }
        auto fields = split(line, delimiter);
        if (fields.size() != table.columns.size())
            throw MalformedRow(line_no, "expected " + std::to_string(table.columns.size()) +
                                            " fields, found " + std::to_string(fields.size()));
        for (auto& f : fields) f = trim(f);
        table.rows.push_back(std::move(fields));
        table.source_lines.push_back(line_no);
    }
    if (!have_header) throw MalformedRow(line_no == 0 ? 1 : line_no, "no header row");
    return table;
}

void write_table(std::ostream& out, const Table& table, char delimiter) {
    for (const auto& c : table.comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << delimiter;
        out << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << delimiter;
            out << row[i];
        }
        out << "\n";
    }
}

std::string format_double(double value) {
    if (value == 0.0) value = 0.0;   // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    // Widen only when 12 significant digits fail to round-trip.
    double back = std::strtod(buf, nullptr);
    if (back != value) std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string format_fixed(double value, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, value);
    return buf;
}

bool parse_double(const std::string& text, double& out) {
    std::string t = trim(text);
    if (t.empty()) return false;
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

bool parse_long(const std::string& text, long long& out) {
    std::string t = trim(text);
    if (t.empty()) return false;
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

} // namespace wft
