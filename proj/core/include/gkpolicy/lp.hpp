#pragma once

#include <vector>

namespace gkp::lp {

enum class RowType { less_equal, equal, greater_equal };

struct Row {
  std::vector<double> coefficients;
  RowType type = RowType::less_equal;
  double rhs = 0.0;
};

// maximize objective·x subject to rows, x >= 0.
struct Problem {
  std::vector<double> objective;
  std::vector<Row> rows;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense two-phase primal simplex with Bland's anti-cycling rule. Intended for
// the small, well-scaled problems of matrix games; pivots are deterministic.
Solution solve(const Problem& problem);

}  // namespace gkp::lp
