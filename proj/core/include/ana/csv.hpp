#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ana {

/// Comma-separated output with a fixed header. Reals are written with 17
/// significant digits so files round-trip and compare byte for byte.
class CsvWriter {
 public:
  /// Throws Error if the file cannot be created.
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  CsvWriter& operator<<(double value);
  CsvWriter& operator<<(long long value);
  CsvWriter& operator<<(unsigned long long value);
  CsvWriter& operator<<(int value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(long value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(unsigned long value) { return *this << static_cast<unsigned long long>(value); }
  CsvWriter& operator<<(bool value) { return *this << std::string_view(value ? "true" : "false"); }
  CsvWriter& operator<<(std::string_view value);
  CsvWriter& operator<<(const char* value) { return *this << std::string_view(value); }
  CsvWriter& operator<<(const std::string& value) { return *this << std::string_view(value); }

  /// Ends the current row. Throws ShapeError if the row has the wrong width.
  void end_row();
  std::size_t columns() const noexcept { return columns_; }

 private:
  void cell(std::string_view text);

  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Shortest decimal text that reads back to the same double ("%.17g").
std::string format_real(double value);

}  // namespace ana
