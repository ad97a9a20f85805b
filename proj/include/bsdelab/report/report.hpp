#pragma once

#include <json.hpp>
#include <string>
#include <variant>
#include <vector>

namespace bsdelab {

// Tabular report with byte-stable serialization: doubles are written with
// 17 significant digits via to_chars (locale-free), rows end with '\n'.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::variant<double, std::string>>> rows;

  void add_row(std::vector<std::variant<double, std::string>> row);
  std::string to_string() const;
};

// Shortest-exact decimal form of a double ("%.17g"-equivalent, locale-free).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

// Serializes with sorted keys and 2-space indentation; nlohmann's map-backed
// objects make the key order deterministic.
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace bsdelab
