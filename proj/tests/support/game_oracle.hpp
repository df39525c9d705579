#pragma once

// Support-enumeration solver for small zero-sum games, independent of the
// library's simplex. Assumes a nondegenerate game, where some equilibrium
// has supports of equal size.

#include <cmath>
#include <optional>
#include <vector>

namespace gkp::testing {

struct OracleSolution {
  std::vector<double> row_mix;
  std::vector<double> col_mix;
  double value = 0.0;
};

// Solves the square system m * x = b in place; false when singular.
inline bool solve_linear(std::vector<std::vector<long double>> m, std::vector<long double> b,
                         std::vector<long double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
    }
    if (std::fabs(m[piv][c]) < 1e-14L) return false;
    std::swap(m[c], m[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
  return true;
}

// a[i][j]: payoff to the (maximizing) row player.
inline std::optional<OracleSolution> support_enumeration(const std::vector<std::vector<double>>& a,
                                                         double tol = 1e-10) {
  const std::size_t rows = a.size();
  const std::size_t cols = a[0].size();
  for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
    for (unsigned rs = 1; rs < (1U << rows); ++rs) {
      if (static_cast<std::size_t>(__builtin_popcount(rs)) != k) continue;
      for (unsigned cs = 1; cs < (1U << cols); ++cs) {
        if (static_cast<std::size_t>(__builtin_popcount(cs)) != k) continue;
        std::vector<std::size_t> ri, ci;
        for (std::size_t i = 0; i < rows; ++i) if (rs & (1U << i)) ri.push_back(i);
        for (std::size_t j = 0; j < cols; ++j) if (cs & (1U << j)) ci.push_back(j);
        // Column mix y on ci equalizing rows ri: unknowns (y, v).
        std::vector<std::vector<long double>> m(k + 1, std::vector<long double>(k + 1, 0.0L));
        std::vector<long double> b(k + 1, 0.0L);
        for (std::size_t r = 0; r < k; ++r) {
          for (std::size_t c = 0; c < k; ++c) m[r][c] = a[ri[r]][ci[c]];
          m[r][k] = -1.0L;
        }
        for (std::size_t c = 0; c < k; ++c) m[k][c] = 1.0L;
        b[k] = 1.0L;
        std::vector<long double> y;
        if (!solve_linear(m, b, y)) continue;
        // Row mix x on ri equalizing columns ci.
        for (std::size_t c = 0; c < k; ++c) {
          for (std::size_t r = 0; r < k; ++r) m[c][r] = a[ri[r]][ci[c]];
          m[c][k] = -1.0L;
        }
        for (std::size_t r = 0; r < k; ++r) m[k][r] = 1.0L;
        std::vector<long double> x;
        if (!solve_linear(m, b, x)) continue;
        const long double v = y[k];
        bool ok = std::fabs(static_cast<double>(x[k] - v)) < 1e-9;
        for (std::size_t i = 0; i < k && ok; ++i) ok = y[i] >= -tol && x[i] >= -tol;
        OracleSolution s;
        s.row_mix.assign(rows, 0.0);
        s.col_mix.assign(cols, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
          s.row_mix[ri[i]] = static_cast<double>(x[i]);
          s.col_mix[ci[i]] = static_cast<double>(y[i]);
        }
        for (std::size_t i = 0; i < rows && ok; ++i) {
          long double u = 0.0L;
          for (std::size_t j = 0; j < cols; ++j) u += a[i][j] * static_cast<long double>(s.col_mix[j]);
          ok = u <= v + tol;
        }
        for (std::size_t j = 0; j < cols && ok; ++j) {
          long double u = 0.0L;
          for (std::size_t i = 0; i < rows; ++i) u += a[i][j] * static_cast<long double>(s.row_mix[i]);
          ok = u >= v - tol;
        }
        if (!ok) continue;
        s.value = static_cast<double>(v);
        return s;
      }
    }
  }
  return std::nullopt;
}

}  // namespace gkp::testing
