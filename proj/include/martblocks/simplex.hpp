#pragma once

#include <vector>

// Dense two-phase primal simplex for
//   min c^T x   s.t.  A x = b,  x >= 0.
//
// Built for the small, fully dense programs the gauge oracle produces
// (tens of rows, up to a few tens of thousands of columns). Dantzig
// pricing with a Bland fallback after a stall, so it terminates on the
// degenerate programs the oracle generates.

namespace martblocks {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  double objective = 0;
  std::vector<double> x;
};

class DenseLp {
 public:
  DenseLp(int rows, int cols);

  void set_entry(int r, int c, double v);
  void set_rhs(int r, double v);
  void set_cost(int c, double v);

  LpResult solve() const;

 private:
  int m_, n_;
  std::vector<double> a_;  // row-major m x n
  std::vector<double> b_;
  std::vector<double> c_;
};

}  // namespace martblocks
