#include "swagg/csv.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "swagg/errors.hpp"

namespace swagg {

std::vector<std::string> split_csv_line(const std::string& line) {
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
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
    if (from >= to || to > s.size()) return false;
    for (std::size_t i = from; i < to; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Timestamp parse_timestamp(const std::string& s) {
    if (s.empty()) throw SchemaError("empty timestamp");
    // Integer epoch seconds, possibly signed.
    const std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (all_digits(s, start, s.size()) && s.find('-', 1) == std::string::npos) {
        char* end = nullptr;
        const long long v = std::strtoll(s.c_str(), &end, 10);
        if (*end == '\0') return v;
    }
    // ISO-8601 date, optional time, optional trailing Z.
    std::string t = s;
    if (!t.empty() && (t.back() == 'Z' || t.back() == 'z')) t.pop_back();
    if (t.size() < 10 || t[4] != '-' || t[7] != '-' || !all_digits(t, 0, 4) ||
        !all_digits(t, 5, 7) || !all_digits(t, 8, 10))
        throw SchemaError("unparseable timestamp '" + s + "'");
    const int year = std::atoi(t.substr(0, 4).c_str());
    const int month = std::atoi(t.substr(5, 2).c_str());
    const int day = std::atoi(t.substr(8, 2).c_str());
    if (month < 1 || month > 12 || day < 1 || day > 31)
        throw SchemaError("invalid date '" + s + "'");
    std::int64_t secs = days_from_civil(year, month, day) * 86400;
    if (t.size() > 10) {
        if (t.size() < 19 || (t[10] != 'T' && t[10] != ' ') || t[13] != ':' || t[16] != ':' ||
            !all_digits(t, 11, 13) || !all_digits(t, 14, 16) || !all_digits(t, 17, 19))
            throw SchemaError("unparseable timestamp '" + s + "'");
        const int hh = std::atoi(t.substr(11, 2).c_str());
        const int mm = std::atoi(t.substr(14, 2).c_str());
        const int ss = std::atoi(t.substr(17, 2).c_str());
        if (hh > 23 || mm > 59 || ss > 60) throw SchemaError("invalid time '" + s + "'");
        secs += hh * 3600 + mm * 60 + ss;
    }
    return secs;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

EntityTable load_entity_table(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw SchemaError(path + ": missing header");
    const auto header = split_csv_line(lines[0]);
    if (header.size() != 2 || header[0] != "entity_id" || header[1] != "label")
        throw SchemaError(path + ": expected header 'entity_id,label'");
    EntityTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_csv_line(lines[i]);
        if (fields.size() != 2)
            throw SchemaError(path + ":" + std::to_string(i + 1) + ": expected 2 fields");
        table.add(std::move(fields[0]), std::move(fields[1]));
    }
    if (table.size() == 0) throw SchemaError(path + ": no entities");
    return table;
}

ActionTable load_action_table(const std::string& path, const EntityTable& entities) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw SchemaError(path + ": missing header");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 3 || header[0] != "entity_id" || header[1] != "timestamp")
        throw SchemaError(path + ": expected header 'entity_id,timestamp,<feature...>'");

    ActionTable table;
    table.features.assign(header.begin() + 2, header.end());
    table.values.assign(table.features.size(), {});

    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != header.size())
            throw SchemaError(path + ":" + std::to_string(i + 1) + ": expected " +
                              std::to_string(header.size()) + " fields, got " +
                              std::to_string(fields.size()));
        const auto it = entities.index.find(fields[0]);
        if (it == entities.index.end())
            throw SchemaError(path + ":" + std::to_string(i + 1) + ": unknown entity '" +
                              fields[0] + "'");
        table.entity.push_back(it->second);
        table.ts.push_back(parse_timestamp(fields[1]));
        for (std::size_t f = 0; f < table.features.size(); ++f) {
            const std::string& cell = fields[2 + f];
            if (cell.empty()) {
                table.values[f].push_back(nan_value());
                continue;
            }
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
                throw SchemaError(path + ":" + std::to_string(i + 1) + ": feature '" +
                                  table.features[f] + "' value '" + cell + "' is not finite");
            table.values[f].push_back(v);
        }
    }
    return table;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

}  // namespace swagg
