#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace airgrid::csv {

// Splits one CSV line; double quotes protect embedded commas ("" escapes a quote).
std::vector<std::string> split_line(const std::string& line);

std::string quote(const std::string& field);

// Line-oriented reader with 1-based line numbers for error messages.
class Reader {
 public:
  explicit Reader(const std::string& path);

  const std::string& path() const { return path_; }
  const std::vector<std::string>& header() const { return header_; }
  int line_number() const { return line_no_; }

  // Advances to the next non-empty row; returns false at end of file.
  bool next(std::vector<std::string>& fields);

  // Column index by header name; throws if absent.
  size_t column(const std::string& name) const;

 private:
  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  int line_no_ = 0;
};

double parse_double(const std::string& s, const std::string& context);
int64_t parse_int(const std::string& s, const std::string& context);

}  // namespace airgrid::csv
