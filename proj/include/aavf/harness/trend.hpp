#pragma once

// Long-time drift trend test over a diagnostic time series.
//
// For each error column the maximum over [0, t*] ("early") is compared with
// the maximum over the whole run. A column passes when full <= 2 * early,
// i.e. the error has stopped growing linearly. The modified pair
// (errMI, errMK) decides the verdict; the medians check that the modified
// quantities are conserved at least as well as the plain ones.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "aavf/errors.hpp"
#include "aavf/harness/csv.hpp"
#include "aavf/system.hpp"

namespace aavf::harness {

struct ColumnTrend {
  std::string name;
  double early_max = 0.0;
  double full_max = 0.0;
  double median = 0.0;
  std::size_t nan_count = 0;

  /// full_max / early_max (1 when both vanish).
  double ratio() const {
    if (early_max == 0.0) return full_max == 0.0 ? 1.0 : HUGE_VAL;
    return full_max / early_max;
  }
  bool sublinear() const {
    return nan_count == 0 && std::isfinite(full_max) &&
           full_max <= 2.0 * early_max;
  }
};

struct TrendReport {
  double t_split = 0.0;
  double t_end = 0.0;
  std::size_t rows = 0;
  ColumnTrend errK, errMK, errI, errMI;

  bool modified_sublinear() const {
    return errMI.sublinear() && errMK.sublinear();
  }
  bool plain_sublinear() const { return errI.sublinear() && errK.sublinear(); }
  bool actions_improved() const { return errMI.median <= errI.median; }
  bool momentum_improved() const { return errMK.median <= errK.median; }

  /// The verdict: errMI and errMK grow sublinearly.
  bool passed() const { return modified_sublinear(); }

  std::string to_text(const std::string& title = "trend test") const {
    std::ostringstream os;
    os.precision(6);
    os << "# " << title << ": max over [0, t_end] vs 2 x max over [0, t*]\n"
       << "t_split: " << t_split << '\n'
       << "t_end: " << t_end << '\n'
       << "rows: " << rows << '\n';
    for (const ColumnTrend* c : {&errK, &errMK, &errI, &errMI}) {
      os << c->name << ": early_max=" << c->early_max
         << " full_max=" << c->full_max << " ratio=" << c->ratio()
         << " median=" << c->median << " nan=" << c->nan_count << ' '
         << (c->sublinear() ? "PASS" : "FAIL") << '\n';
    }
    os << "median(errMI) <= median(errI): "
       << (actions_improved() ? "yes" : "no") << '\n'
       << "median(errMK) <= median(errK): "
       << (momentum_improved() ? "yes" : "no") << '\n'
       << "verdict: " << (passed() ? "PASS" : "FAIL") << '\n';
    return os.str();
  }
};

namespace detail {

inline ColumnTrend column_trend(const std::vector<DiagnosticRow>& rows,
                                double DiagnosticRow::*field, std::string name,
                                double t_split) {
  ColumnTrend c;
  c.name = std::move(name);
  std::vector<double> finite;
  for (const auto& r : rows) {
    const double v = r.*field;
    if (std::isnan(v)) {
      ++c.nan_count;
      continue;
    }
    finite.push_back(v);
    c.full_max = std::max(c.full_max, v);
    if (r.t <= t_split) c.early_max = std::max(c.early_max, v);
  }
  if (finite.empty()) {
    c.median = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto mid = finite.size() / 2;
    std::nth_element(finite.begin(), finite.begin() + static_cast<long>(mid),
                     finite.end());
    double med = finite[mid];
    if (finite.size() % 2 == 0) {
      med = 0.5 * (med + *std::max_element(finite.begin(),
                                           finite.begin() + static_cast<long>(mid)));
    }
    c.median = med;
  }
  return c;
}

}  // namespace detail

inline TrendReport trend_test(const std::vector<DiagnosticRow>& rows,
                              double t_split) {
  if (rows.empty()) throw InvalidInput("trend test needs at least one row");
  TrendReport r;
  r.t_split = t_split;
  r.t_end = rows.back().t;
  r.rows = rows.size();
  if (!(t_split > rows.front().t) || !(t_split < r.t_end)) {
    throw InvalidParameter("trend split must lie strictly inside the run");
  }
  r.errK = detail::column_trend(rows, &DiagnosticRow::errK, "errK", t_split);
  r.errMK = detail::column_trend(rows, &DiagnosticRow::errMK, "errMK", t_split);
  r.errI = detail::column_trend(rows, &DiagnosticRow::errI, "errI", t_split);
  r.errMI = detail::column_trend(rows, &DiagnosticRow::errMI, "errMI", t_split);
  return r;
}

inline TrendReport trend_test(const std::string& csv_path, double t_split) {
  return trend_test(parse_csv(csv_path), t_split);
}

}  // namespace aavf::harness
