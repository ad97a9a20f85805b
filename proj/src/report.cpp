#include "bsdelab/report/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace bsdelab {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::variant<double, std::string>> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("CsvTable: row width != column count");
  rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (std::holds_alternative<double>(row[i]))
        out += format_double(std::get<double>(row[i]));
      else
        out += std::get<std::string>(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw std::runtime_error("short write: " + path);
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace bsdelab
