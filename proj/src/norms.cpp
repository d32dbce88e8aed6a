#include "martblocks/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace martblocks {

double conjugate_exponent(double p) {
  if (std::isinf(p)) return 1.0;
  if (!(p > 1)) throw std::invalid_argument("conjugate_exponent: p must exceed 1");
  return p / (p - 1.0);
}

NormParams::NormParams(double p_, double pprime_) : p(p_), pprime(pprime_) {
  if (!(p > 1)) throw std::invalid_argument("NormParams: p must exceed 1");
  double want = conjugate_exponent(p);
  bool ok = std::isinf(pprime) ? std::isinf(want) : std::fabs(pprime - want) <= 1e-12 * std::max(1.0, std::fabs(want));
  if (!ok) throw std::invalid_argument("NormParams: exponents are not conjugate");
}

double h1_norm(const Rv& f, const Filtration& F) { return lp_norm(cond_square_function(f, F), 1.0); }

double H1_norm(const Rv& f, const Filtration& F) { return lp_norm(square_function(f, F), 1.0); }

double bmo_norm(const Rv& f, const Filtration& F, double moment) {
  if (!(moment >= 1)) throw std::invalid_argument("bmo_norm: moment must be >= 1");
  double out = 0;
  for (int k = 1; k <= F.depth(); ++k) {
    Rv centered = rv_sub(f, cond_exp(f, F, k));
    for (double& x : centered.values) x = std::pow(std::fabs(x), moment);
    Rv m = cond_exp(centered, F, k);
    for (double v : m.values) out = std::max(out, std::pow(v, 1.0 / moment));
  }
  return out;
}

double BMO_norm(const Rv& f, const Filtration& F) {
  double out = 0;
  for (int k = 1; k <= F.depth(); ++k) {
    Rv centered = (k == 1) ? f : rv_sub(f, cond_exp(f, F, k - 1));
    for (double& x : centered.values) x = x * x;
    Rv m = cond_exp(centered, F, k);
    for (double v : m.values) out = std::max(out, std::sqrt(std::max(v, 0.0)));
  }
  return out;
}

std::pair<double, double> bmo_equiv_gap(const Rv& f, const Filtration& F) {
  double sup_diff = 0;
  for (int k = 1; k <= F.depth(); ++k) sup_diff = std::max(sup_diff, linf_norm(mart_diff(f, F, k)));
  return {BMO_norm(f, F), bmo_norm(f, F, 2.0) + sup_diff};
}

double diag_norm(const Rv& f, const Filtration& F) {
  double s = 0;
  for (int k = 1; k <= F.depth(); ++k) s += lp_norm(mart_diff(f, F, k), 1.0);
  return s;
}

namespace {

// avg over the given points of |f - E_k f|^q, plus the block-free term.
double lambda_term(const Rv& centered, double dfk_inf, const Filtration& F,
                   const std::vector<int>& pts, double mu, double p0, double q) {
  double s = 0;
  for (int i : pts) s += F.space()->weight(i) * std::pow(std::fabs(centered[i]), q);
  double avg = std::pow(s / mu, 1.0 / q);
  return std::pow(mu, 1.0 - 1.0 / p0) * (avg + dfk_inf);
}

double lambda_scan(const Rv& f, const Filtration& F, double p0, double q, bool unions) {
  if (!(p0 > 0) || !(p0 < 1)) throw std::invalid_argument("lambda_pq_norm: p0 must lie in (0,1)");
  if (!(q >= 1) || std::isinf(q)) throw std::invalid_argument("lambda_pq_norm: q must lie in [1,inf)");
  double out = 0;
  for (int k = 1; k <= F.depth(); ++k) {
    Rv centered = rv_sub(f, cond_exp(f, F, k));
    double dfk_inf = linf_norm(mart_diff(f, F, k));
    const int B = F.block_count(k);
    for (int b = 0; b < B; ++b)
      out = std::max(out, lambda_term(centered, dfk_inf, F, F.block_points(k, b),
                                      F.block_measure(k, b), p0, q));
    if (unions) {
      for (int b = 0; b < B; ++b)
        for (int c = b + 1; c < B; ++c) {
          std::vector<int> pts = F.block_points(k, b);
          const auto& more = F.block_points(k, c);
          pts.insert(pts.end(), more.begin(), more.end());
          out = std::max(out, lambda_term(centered, dfk_inf, F, pts,
                                          F.block_measure(k, b) + F.block_measure(k, c), p0, q));
        }
    }
  }
  return out;
}

}  // namespace

double lambda_pq_norm(const Rv& f, const Filtration& F, double p0, double q) {
  return lambda_scan(f, F, p0, q, false);
}

double lambda_pq_norm_ext(const Rv& f, const Filtration& F, double p0, double q) {
  return lambda_scan(f, F, p0, q, true);
}

}  // namespace martblocks
