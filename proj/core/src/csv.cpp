#include "ana/csv.hpp"

#include <fmt/format.h>

#include "ana/errors.hpp"

namespace ana {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error("cannot create " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::operator<<(double value) {
  cell(format_real(value));
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long value) {
  cell(fmt::format("{}", value));
  return *this;
}

CsvWriter& CsvWriter::operator<<(unsigned long long value) {
  cell(fmt::format("{}", value));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view value) {
  if (value.find_first_of(",\"\n") != std::string_view::npos) {
    std::string quoted = "\"";
    for (char c : value) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    cell(quoted);
  } else {
    cell(value);
  }
  return *this;
}

void CsvWriter::cell(std::string_view text) {
  if (filled_ > 0) out_ << ',';
  out_ << text;
  ++filled_;
}

void CsvWriter::end_row() {
  if (filled_ != columns_)
    throw ShapeError("csv row has " + std::to_string(filled_) + " cells, header has " + std::to_string(columns_));
  out_ << '\n';
  filled_ = 0;
  if (!out_) throw Error("csv write failed");
}

}  // namespace ana
