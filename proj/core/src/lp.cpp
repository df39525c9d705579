#include "gkpolicy/lp.hpp"

#include <cmath>
#include <limits>

#include "gkpolicy/error.hpp"

namespace gkp::lp {

namespace {

constexpr double kEps = 1e-12;

// Tableau rows 0..m-1 are constraints, row m is the objective (reduced costs
// stored as  z_j - c_j, so a negative entry marks an improving column).
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (n_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (n_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, n_); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= n_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Runs simplex iterations over the columns allowed by `usable`. Returns
  // false when the objective is unbounded.
  template <class Usable>
  bool optimize(Usable usable) {
    const std::size_t max_iter = 50 * (m_ + n_ + 10);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      std::size_t enter = n_;
      for (std::size_t c = 0; c < n_; ++c) {
        if (usable(c) && at(m_, c) < -kEps) {
          enter = c;
          break;
        }
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double coef = at(r, enter);
        if (coef <= kEps) continue;
        const double ratio = at(r, n_) / coef;
        if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && leave < m_ && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
    throw Error("simplex iteration limit reached");
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t n = problem.objective.size();
  const std::size_t m = problem.rows.size();
  for (const auto& row : problem.rows) {
    if (row.coefficients.size() != n) throw Error("LP row width does not match the objective");
  }

  // Normalize to nonnegative right-hand sides.
  std::vector<Row> rows = problem.rows;
  for (auto& row : rows) {
    if (row.rhs < 0.0) {
      for (double& c : row.coefficients) c = -c;
      row.rhs = -row.rhs;
      if (row.type == RowType::less_equal) {
        row.type = RowType::greater_equal;
      } else if (row.type == RowType::greater_equal) {
        row.type = RowType::less_equal;
      }
    }
  }

  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (const auto& row : rows) {
    if (row.type != RowType::equal) ++n_slack;
    if (row.type != RowType::less_equal) ++n_art;
  }
  const std::size_t art_begin = n + n_slack;
  const std::size_t total = art_begin + n_art;
  Tableau t(m, total);

  std::size_t slack = n;
  std::size_t art = art_begin;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) t.at(r, c) = rows[r].coefficients[c];
    t.rhs(r) = rows[r].rhs;
    switch (rows[r].type) {
      case RowType::less_equal:
        t.at(r, slack) = 1.0;
        t.basis(r) = slack++;
        break;
      case RowType::greater_equal:
        t.at(r, slack++) = -1.0;
        t.at(r, art) = 1.0;
        t.basis(r) = art++;
        break;
      case RowType::equal:
        t.at(r, art) = 1.0;
        t.basis(r) = art++;
        break;
    }
  }

  Solution sol;
  if (n_art > 0) {
    // Phase 1: maximize -sum(artificials).
    for (std::size_t c = art_begin; c < total; ++c) t.at(m, c) = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis(r) < art_begin) continue;
      for (std::size_t c = 0; c <= total; ++c) t.at(m, c) -= t.at(r, c);
    }
    t.optimize([](std::size_t) { return true; });
    if (t.rhs(m) < -1e-9) {
      sol.status = Status::infeasible;
      return sol;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis(r) < art_begin) continue;
      for (std::size_t c = 0; c < art_begin; ++c) {
        if (std::abs(t.at(r, c)) > 1e-9) {
          t.pivot(r, c);
          break;
        }
      }
    }
  }

  // Phase 2 objective row: reduced costs z_j - c_j for maximization.
  for (std::size_t c = 0; c <= total; ++c) t.at(m, c) = 0.0;
  for (std::size_t c = 0; c < n; ++c) t.at(m, c) = -problem.objective[c];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = t.basis(r);
    if (b >= n) continue;
    const double cb = problem.objective[b];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= total; ++c) t.at(m, c) += cb * t.at(r, c);
  }
  const bool bounded = t.optimize([art_begin](std::size_t c) { return c < art_begin; });
  if (!bounded) {
    sol.status = Status::unbounded;
    return sol;
  }

  sol.status = Status::optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis(r) < n) sol.x[t.basis(r)] = std::max(0.0, t.rhs(r));
  }
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) sol.objective += problem.objective[c] * sol.x[c];
  return sol;
}

}  // namespace gkp::lp
