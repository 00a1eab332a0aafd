#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace wsn {

// Minimal CSV support for the formats this project owns: comma separation,
// no quoting, first line is the header.
struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads and validates against an expected header when provided. Throws
// ValidationError with the offending row number on malformed input.
CsvFile read_csv(const std::filesystem::path& path,
                 const std::vector<std::string>& expected_header = {});

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace wsn
