#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace winshift {

// Minimal CSV support for the fixed file formats used across the project.
// Fields must not contain commas, quotes, or newlines; none of our formats
// need them. Doubles are written with shortest round-trip formatting so a
// load after a save is bit-exact.

std::vector<std::string> split_csv_line(const std::string& line);

std::string fmt_double(double v);

double parse_double(const std::string& field, const std::string& where);
long long parse_int(const std::string& field, const std::string& where);

// Streaming row reader; the header line is consumed by the constructor.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  const std::string& path() const { return path_; }
  int line_no() const { return line_no_; }

  // Fills `fields` with the next data row. Returns false at end of file.
  // Throws ValidationError if the row has the wrong field count.
  bool next(std::vector<std::string>& fields);

 private:
  std::ifstream in_;
  std::string path_;
  std::string line_;
  std::vector<std::string> header_;
  int line_no_ = 0;
};

void require_header(const CsvReader& reader, const std::vector<std::string>& expected);

std::ofstream open_output(const std::string& path);

}  // namespace winshift
