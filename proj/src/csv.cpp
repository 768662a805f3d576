#include "winshift/csv.hpp"

#include <charconv>
#include <system_error>

#include "winshift/errors.hpp"

namespace winshift {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& where) {
  double v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ValidationError(where + ": malformed number '" + field + "'");
  }
  return v;
}

long long parse_int(const std::string& field, const std::string& where) {
  long long v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ValidationError(where + ": malformed integer '" + field + "'");
  }
  return v;
}

CsvReader::CsvReader(const std::string& path) : in_(path), path_(path) {
  if (!in_) throw ValidationError("cannot open " + path);
  if (!std::getline(in_, line_)) throw ValidationError(path + ": empty file, header expected");
  ++line_no_;
  header_ = split_csv_line(line_);
}

bool CsvReader::next(std::vector<std::string>& fields) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (line_.empty() || line_ == "\r") continue;
    fields = split_csv_line(line_);
    if (fields.size() != header_.size()) {
      throw ValidationError(path_ + ":" + std::to_string(line_no_) + ": expected " +
                            std::to_string(header_.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    return true;
  }
  return false;
}

void require_header(const CsvReader& reader, const std::vector<std::string>& expected) {
  if (reader.header() != expected) {
    std::string want;
    for (const auto& c : expected) {
      if (!want.empty()) want += ',';
      want += c;
    }
    throw ValidationError(reader.path() + ": bad header, expected '" + want + "'");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

}  // namespace winshift
