#pragma once

// Locale-independent CSV emission: 17 significant digits, '.' decimal point,
// '\n' line endings, so equal runs give equal bytes.

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorport::app {

inline std::string format_number(long double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (r.ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, r.ptr);
}

inline std::string format_number(std::uint64_t v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header) : width_(header.size()) { append(header); }

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("CsvTable: row width does not match header");
    append(cells);
  }

  const std::string& text() const { return text_; }

private:
  void append(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::size_t width_;
  std::string text_;
};

}  // namespace mirrorport::app
