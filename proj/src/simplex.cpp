#include "martblocks/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace martblocks {

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kZeroEps = 1e-11;

// Tableau with an appended objective row. Columns: structural + artificial.
struct Tableau {
  int m, n;                 // rows, total columns
  std::vector<double> t;    // (m+1) x (n+1), last column = rhs / -objective
  std::vector<int> basis;   // basic column per row

  double& at(int r, int c) { return t[static_cast<std::size_t>(r) * (n + 1) + c]; }
  double at(int r, int c) const { return t[static_cast<std::size_t>(r) * (n + 1) + c]; }

  void pivot(int pr, int pc) {
    const double piv = at(pr, pc);
    const double inv = 1.0 / piv;
    for (int c = 0; c <= n; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r <= m; ++r) {
      if (r == pr) continue;
      double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= n; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis[static_cast<std::size_t>(pr)] = pc;
  }

  // One simplex phase over columns [0, limit). Returns false on unbounded.
  bool run(int limit) {
    int stall = 0;
    double last_obj = at(m, n);
    const long max_iter = 2000L + 50L * (static_cast<long>(m) + 40L) * 40L;
    for (long iter = 0; iter < max_iter; ++iter) {
      bool bland = stall > 2 * (m + 4);
      int pc = -1;
      if (bland) {
        for (int c = 0; c < limit; ++c)
          if (at(m, c) < -kPivotEps) { pc = c; break; }
      } else {
        double best = -kPivotEps;
        for (int c = 0; c < limit; ++c)
          if (at(m, c) < best) { best = at(m, c); pc = c; }
      }
      if (pc < 0) return true;  // optimal
      int pr = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        double a = at(r, pc);
        if (a > kPivotEps) {
          double ratio = at(r, n) / a;
          if (ratio < best_ratio - kZeroEps ||
              (ratio < best_ratio + kZeroEps && (pr < 0 || basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(pr)]))) {
            best_ratio = ratio;
            pr = r;
          }
        }
      }
      if (pr < 0) return false;  // unbounded direction
      pivot(pr, pc);
      double obj = at(m, n);
      if (std::fabs(obj - last_obj) <= kZeroEps * (1.0 + std::fabs(obj))) ++stall; else stall = 0;
      last_obj = obj;
    }
    throw std::runtime_error("DenseLp: iteration limit hit");
  }
};

}  // namespace

DenseLp::DenseLp(int rows, int cols) : m_(rows), n_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("DenseLp: negative dimensions");
  a_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
  b_.assign(static_cast<std::size_t>(rows), 0.0);
  c_.assign(static_cast<std::size_t>(cols), 0.0);
}

void DenseLp::set_entry(int r, int c, double v) { a_[static_cast<std::size_t>(r) * n_ + c] = v; }
void DenseLp::set_rhs(int r, double v) { b_[static_cast<std::size_t>(r)] = v; }
void DenseLp::set_cost(int c, double v) { c_[static_cast<std::size_t>(c)] = v; }

LpResult DenseLp::solve() const {
  Tableau tb;
  tb.m = m_;
  tb.n = n_ + m_;  // structural + one artificial per row
  tb.t.assign(static_cast<std::size_t>(tb.m + 1) * (tb.n + 1), 0.0);
  tb.basis.assign(static_cast<std::size_t>(tb.m), 0);

  for (int r = 0; r < m_; ++r) {
    double s = (b_[static_cast<std::size_t>(r)] < 0) ? -1.0 : 1.0;
    for (int c = 0; c < n_; ++c) tb.at(r, c) = s * a_[static_cast<std::size_t>(r) * n_ + c];
    tb.at(r, n_ + r) = 1.0;
    tb.at(r, tb.n) = s * b_[static_cast<std::size_t>(r)];
    tb.basis[static_cast<std::size_t>(r)] = n_ + r;
  }

  // phase 1: minimize the artificial sum
  for (int c = 0; c <= tb.n; ++c) {
    double s = 0;
    for (int r = 0; r < m_; ++r) s += tb.at(r, c);
    tb.at(tb.m, c) = (c >= n_ && c < tb.n) ? 0.0 : -s;
  }
  // objective row stores reduced costs; rhs cell carries -objective
  if (!tb.run(n_)) throw std::runtime_error("DenseLp: phase 1 unbounded");
  double infeas = -tb.at(tb.m, tb.n);
  if (infeas > 1e-7) {
    LpResult res;
    res.status = LpStatus::infeasible;
    return res;
  }
  // drive leftover artificials out of the basis where possible
  for (int r = 0; r < m_; ++r) {
    if (tb.basis[static_cast<std::size_t>(r)] >= n_) {
      int pc = -1;
      for (int c = 0; c < n_; ++c)
        if (std::fabs(tb.at(r, c)) > kPivotEps) { pc = c; break; }
      if (pc >= 0) tb.pivot(r, pc);
      // else: the row is redundant; the artificial stays at value ~0
    }
  }

  // phase 2: real costs, artificials priced out of reach
  for (int c = 0; c <= tb.n; ++c) tb.at(tb.m, c) = 0.0;
  for (int c = 0; c < n_; ++c) tb.at(tb.m, c) = c_[static_cast<std::size_t>(c)];
  for (int r = 0; r < m_; ++r) {
    int bc = tb.basis[static_cast<std::size_t>(r)];
    if (bc < tb.n && tb.at(tb.m, bc) != 0.0) {
      double f = tb.at(tb.m, bc);
      for (int c = 0; c <= tb.n; ++c) tb.at(tb.m, c) -= f * tb.at(r, c);
    }
  }
  if (!tb.run(n_)) {
    LpResult res;
    res.status = LpStatus::unbounded;
    return res;
  }

  LpResult res;
  res.status = LpStatus::optimal;
  res.x.assign(static_cast<std::size_t>(n_), 0.0);
  for (int r = 0; r < m_; ++r) {
    int bc = tb.basis[static_cast<std::size_t>(r)];
    if (bc < n_) res.x[static_cast<std::size_t>(bc)] = tb.at(r, tb.n);
  }
  double obj = 0;
  for (int c = 0; c < n_; ++c) obj += c_[static_cast<std::size_t>(c)] * res.x[static_cast<std::size_t>(c)];
  res.objective = obj;
  return res;
}

}  // namespace martblocks
