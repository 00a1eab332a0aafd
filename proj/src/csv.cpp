#include "wsn/csv.hpp"

#include <fstream>

#include "wsn/error.hpp"

namespace wsn {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

CsvFile read_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open csv file " + path.string());
  CsvFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line_no == 1) {
      file.header = std::move(fields);
      if (!expected_header.empty() && file.header != expected_header) {
        throw ValidationError(path.string() + ": unexpected csv header");
      }
      continue;
    }
    if (fields.size() != file.header.size()) {
      throw ValidationError(path.string() + " row " + std::to_string(line_no) +
                            ": expected " + std::to_string(file.header.size()) +
                            " fields, got " + std::to_string(fields.size()));
    }
    file.rows.push_back(std::move(fields));
  }
  if (file.header.empty()) {
    throw ValidationError(path.string() + ": empty csv file");
  }
  return file;
}

}  // namespace wsn
