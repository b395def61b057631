#pragma once

// Shared helpers for the text-header + binary-payload file formats.

#include <bit>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "atr/error.hpp"

namespace atr::io {

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_f64le(std::ostream& out, std::span<const double> values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline double decode_f64le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  }
  return std::bit_cast<double>(bits);
}

/// Reads header lines of the form "key: value ..." in a fixed order.
class HeaderReader {
 public:
  explicit HeaderReader(std::istream& in) : in_(in) {}

  std::string next_line() {
    std::string line;
    if (!std::getline(in_, line)) throw FormatError("unexpected end of header", line_ + 1, offset_);
    ++line_;
    line_start_ = offset_;
    offset_ += line.size() + 1;
    return line;
  }

  void expect_exact(std::string_view text) {
    const std::string line = next_line();
    if (line != text) fail("expected '" + std::string(text) + "', got '" + line + "'");
  }

  /// Returns the whitespace-separated tokens following "key:".
  std::vector<std::string> expect_key(std::string_view key) {
    const std::string line = next_line();
    const std::string prefix = std::string(key) + ":";
    if (line.rfind(prefix, 0) != 0) fail("expected key '" + std::string(key) + "'");
    std::vector<std::string> tokens;
    std::size_t pos = prefix.size();
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      std::size_t end = line.find(' ', pos);
      if (end == std::string::npos) end = line.size();
      tokens.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return tokens;
  }

  double to_double(const std::string& token) const {
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      fail("invalid number '" + token + "'");
    }
    return v;
  }

  long long to_int(const std::string& token) const {
    long long v = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      fail("invalid integer '" + token + "'");
    }
    return v;
  }

  /// Errors point at the start of the current line.
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(what, line_, line_start_);
  }

  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

  /// Reads the remainder of the stream as the binary payload.
  std::string read_payload() {
    return std::string(std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>());
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t offset_ = 0;
  std::size_t line_start_ = 0;
};

}  // namespace atr::io
