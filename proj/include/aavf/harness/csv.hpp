#pragma once

// Diagnostic time series as CSV:
//   t,H,dH_rel,K,Khat,errK,errMK,errI,errMI
// Values use 17 significant digits via std::to_chars (locale independent),
// lines end with a single '\n', and there is no trailing blank line.

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "aavf/errors.hpp"
#include "aavf/system.hpp"

namespace aavf::harness {

inline constexpr std::string_view kCsvHeader =
    "t,H,dH_rel,K,Khat,errK,errMK,errI,errMI";

inline std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("malformed number '" + std::string(text) + "'");
  }
  return v;
}

inline std::array<double, 9> row_fields(const DiagnosticRow& r) {
  return {r.t, r.H, r.dH_rel, r.K, r.Khat, r.errK, r.errMK, r.errI, r.errMI};
}

inline void write_csv(const std::vector<DiagnosticRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto f = row_fields(r);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i) os << ',';
      os << format_double(f[i]);
    }
    os << '\n';
  }
}

inline void emit_csv(const std::vector<DiagnosticRow>& rows,
                     const std::string& path) {
  if (rows.empty()) throw InvalidInput("no rows to write");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_csv(rows, os);
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

inline std::vector<DiagnosticRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw ParseError("missing or unexpected CSV header");
  }
  std::vector<DiagnosticRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    std::array<double, 9> f{};
    std::size_t start = 0, col = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      const auto end = comma == std::string::npos ? line.size() : comma;
      if (col >= f.size()) {
        throw ParseError("too many fields on line " + std::to_string(lineno));
      }
      try {
        f[col++] = parse_double(std::string_view(line).substr(start, end - start));
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " on line " +
                         std::to_string(lineno));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (col != f.size()) {
      throw ParseError("expected 9 fields on line " + std::to_string(lineno));
    }
    rows.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8]});
  }
  return rows;
}

inline std::vector<DiagnosticRow> parse_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_csv(is);
}

}  // namespace aavf::harness
