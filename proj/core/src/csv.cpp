#include "gaussbp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "gaussbp/error.hpp"

namespace gaussbp {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
  for (auto c : columns) *this << c;
  end_row();
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double x) {
  separator();
  out_ << format_number(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(unsigned long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  separator();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gaussbp
