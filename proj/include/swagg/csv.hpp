#pragma once

#include <string>
#include <vector>

#include "swagg/tables.hpp"

namespace swagg {

// Minimal RFC-4180-ish CSV: quoted fields may contain commas, quotes double up.
std::vector<std::string> split_csv_line(const std::string& line);
std::string csv_escape(const std::string& field);

// Fixed-format float rendering used by every writer, so identical data
// serializes to identical bytes.
std::string format_double(double v);

// Accepts integer epoch seconds or ISO-8601 (YYYY-MM-DD[(T| )HH:MM:SS][Z]).
Timestamp parse_timestamp(const std::string& s);

// Header `entity_id,label`.
EntityTable load_entity_table(const std::string& path);

// Header `entity_id,timestamp,<feature...>`; empty cell = missing value.
// Rows naming unknown entities are a SchemaError.
ActionTable load_action_table(const std::string& path, const EntityTable& entities);

void write_file(const std::string& path, const std::string& content);

}  // namespace swagg
