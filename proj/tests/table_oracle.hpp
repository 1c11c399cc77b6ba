// Linear-weight oracle and the weights as typeset in the published table.
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "angio/weno.hpp"
#include "oracles.hpp"

namespace oracle {

using angio::weno::EvalPoint;

inline angio::weno::Stencil5 monomial_stencil(int k, double shift) {
  angio::weno::Stencil5 s;
  for (int m = 0; m < 5; ++m) s[m] = monomial_average(k, shift + (m - 2));
  return s;
}

// d from sum d = 1 and exactness on x^3, x^4 (degrees <= 2 hold for every
// sub-stencil), by Cramer's rule in long double.
inline std::array<long double, 3> solved_weights(EvalPoint p) {
  const double t = angio::weno::offset(p);
  long double a[3][3];
  long double b[3];
  a[0][0] = a[0][1] = a[0][2] = 1.0L;
  b[0] = 1.0L;
  for (int r = 1; r <= 2; ++r) {
    const int k = r + 2;
    const angio::weno::Triple q = angio::weno::substencil_values(monomial_stencil(k, 0.0), t);
    for (int m = 0; m < 3; ++m) a[r][m] = q[m];
    b[r] = std::pow(static_cast<long double>(t), k);
  }
  const auto det = [](long double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const long double d0 = det(a);
  std::array<long double, 3> d{};
  for (int c = 0; c < 3; ++c) {
    long double m[3][3];
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) m[r][k] = k == c ? b[r] : a[r][k];
    d[c] = det(m) / d0;
  }
  return d;
}


struct PrintedRow {
  const char* label;
  double offset;  // as printed, in cell widths from x_i
  double d[3];
};

// Values as typeset in the published table of linear weights.
inline std::vector<PrintedRow> printed_table() {
  const double s15 = std::sqrt(15.0), s10 = std::sqrt(10.0);
  return {
      {"x_{i-1/2} - sqrt15/10", -0.5 - s15 / 10,
       {(307 + 72 * s15) / 960, (8377 - 1542 * s15) / 6720, 173 * (-11 + 3 * s15) / 3360}},
      {"x_{i-1/2}", -0.5, {341.0 / 1200, 337.0 / 600, 37.0 / 240}},
      {"x_{i-1/2} + sqrt15/10", -0.5 + s15 / 10,
       {(307 - 72 * s15) / 960, (8377 + 1542 * s15) / 6720, -173 * (11 + 3 * s15) / 3360}},
      {"x_{i+1/2} - sqrt15/10", 0.5 - s15 / 10,
       {-173 * (11 + 3 * s15) / 3360, (8377 + 1542 * s15) / 6720, (307 - 72 * s15) / 960}},
      {"x_{i+1/2}", 0.5, {37.0 / 240, 337.0 / 600, 341.0 / 1200}},
      {"x_{i+1/2} + sqrt15/10", 0.5 + s15 / 10,
       {173 * (-11 + 3 * s15) / 3360, (8377 - 1542 * s15) / 6720, (307 + 72 * s15) / 960}},
      {"x_i - sqrt10/5", -s10 / 5, {(427 + 87 * s15) / 1590, 368.0 / 795, (427 - 87 * s15) / 590}},
      {"x_i - sqrt10/10", -s10 / 10, {(29147 - 246 * s15) / 129360, 35533.0 / 64680, (29147 + 246 * s15) / 129360}},
      {"x_i", 0.0, {-2.0 / 15, 19.0 / 15, -2.0 / 15}},
      {"x_i + sqrt10/10", s10 / 10, {(29147 + 246 * s15) / 129360, 35533.0 / 64680, (29147 - 246 * s15) / 129360}},
      {"x_i + sqrt10/5", s10 / 5, {(427 - 87 * s15) / 1590, 368.0 / 795, (427 + 87 * s15) / 1590}},
  };
}


// Entries where the printed table disagrees with the solved weights.
inline std::vector<std::string> printed_table_diff() {
  std::vector<std::string> diffs;
  const auto rows = printed_table();
  for (int p = 0; p < angio::weno::kNumEvalPoints; ++p) {
    const auto ep = static_cast<EvalPoint>(p);
    const auto d = solved_weights(ep);
    if (std::abs(rows[p].offset - angio::weno::offset(ep)) > 1e-12)
      diffs.push_back(std::string(rows[p].label) + ": position");
    for (int m = 0; m < 3; ++m)
      if (std::abs(rows[p].d[m] - static_cast<double>(d[m])) > 1e-12)
        diffs.push_back(std::string(rows[p].label) + ": d" + std::to_string(m + 1));
  }
  return diffs;
}

// Four node labels print sqrt10 where sqrt15 is meant, and one denominator
// prints 590 for 1590.
inline const std::vector<std::string> kKnownMisprints = {
    "x_i - sqrt10/5: position", "x_i - sqrt10/5: d3", "x_i - sqrt10/10: position", "x_i + sqrt10/10: position",
    "x_i + sqrt10/5: position"};

}  // namespace oracle
