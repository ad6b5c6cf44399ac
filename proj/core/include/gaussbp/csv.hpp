#pragma once

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace gaussbp {

/// Fixed "%.12g" rendering so CSV artifacts are byte-stable.
std::string format_number(double x);

/// Minimal comma-separated writer. Fields are never quoted; callers only
/// emit numbers and identifier-like strings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> columns);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(unsigned long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(std::size_t x) { return *this << static_cast<unsigned long long>(x); }
  CsvWriter& operator<<(std::string_view s);

  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

/// Writes `contents` to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace gaussbp
