#include "martblocks/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "martblocks/kernels.hpp"
#include "martblocks/norms.hpp"
#include "martblocks/simplex.hpp"

namespace martblocks {

namespace {

constexpr double kSupportTol = 1e-12;

// norm comparisons are relative once the bound exceeds 1 (tiny supports
// push mu(A)^{-1/p'} far above the absolute roundoff scale)
bool within_bound(double value, double bound, double tol) {
  return value <= bound + tol * std::max(1.0, bound);
}

std::vector<int> support_points(const Rv& f, double tol = kSupportTol) {
  std::vector<int> pts;
  for (int i = 0; i < f.size(); ++i)
    if (std::fabs(f[i]) > tol) pts.push_back(i);
  return pts;
}

bool subset_of(const std::vector<int>& small, const std::vector<int>& big) {
  std::vector<char> in;
  int hi = -1;
  for (int i : big) hi = std::max(hi, i);
  for (int i : small) hi = std::max(hi, i);
  in.assign(static_cast<std::size_t>(hi + 1), 0);
  for (int i : big) in[static_cast<std::size_t>(i)] = 1;
  for (int i : small)
    if (!in[static_cast<std::size_t>(i)]) return false;
  return true;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// union of level-k blocks meeting `pts`
std::vector<int> level_cover(const Filtration& F, int k, const std::vector<int>& pts) {
  std::vector<int> blocks;
  for (int i : pts) blocks.push_back(F.block_of(k, i));
  blocks = sorted_unique(std::move(blocks));
  std::vector<int> cover;
  for (int b : blocks) {
    const auto& bp = F.block_points(k, b);
    cover.insert(cover.end(), bp.begin(), bp.end());
  }
  return sorted_unique(std::move(cover));
}

bool level_measurable(const Rv& f, const Filtration& F, int k, double tol) {
  const int B = F.block_count(k);
  for (int b = 0; b < B; ++b) {
    const auto& pts = F.block_points(k, b);
    double v0 = f[pts.front()];
    for (int i : pts)
      if (std::fabs(f[i] - v0) > tol) return false;
  }
  return true;
}

bool space_matches(const Rv& f, const Filtration& F) {
  return f.space && f.size() == F.points() &&
         (f.space == F.space() || f.space->weights() == F.space()->weights());
}

// band index j with value in (1/(j+1), 1/j]
long long inverse_band(double v) { return static_cast<long long>(std::floor(1.0 / v + 1e-9)); }

// dyadic index m with value in (2^m, 2^{m+1}]
int dyadic_band(double v) { return static_cast<int>(std::floor(std::log2(v) - 1e-12)); }

struct SingleAtom {
  bool sigma1 = false;
  int k = 0;
  std::vector<int> A;
};

// Detects whether f is, as given, one valid p-atom. Cancellation k is taken
// maximal (the valid k form an initial segment by the tower property) and A
// minimal, which only loosens the norm bound; so one check is complete.
std::optional<SingleAtom> detect_single_atom(const Rv& f, const Filtration& F, double p) {
  auto supp = support_points(f);
  if (supp.empty()) return std::nullopt;
  if (level_measurable(f, F, 1, 1e-10) && std::fabs(lp_norm(f, 1.0) - 1.0) <= 1e-9) {
    SingleAtom s;
    s.sigma1 = true;
    return s;
  }
  int kmax = 0;
  for (int k = F.depth(); k >= 1; --k) {
    if (linf_norm(cond_exp(f, F, k)) <= 1e-10) {
      kmax = k;
      break;
    }
  }
  if (kmax == 0) return std::nullopt;
  std::vector<int> A = level_cover(F, kmax, supp);
  double bound = std::pow(F.space()->measure(A), -1.0 / conjugate_exponent(p));
  if (lp_norm(f, p) <= bound * (1.0 + 1e-9)) {
    SingleAtom s;
    s.k = kmax;
    s.A = std::move(A);
    return s;
  }
  return std::nullopt;
}

AtomicBlock scale_block(AtomicBlock b, double c) {
  if (b.sigma1) {
    for (double& x : b.sigma1_values.values) x *= c;
  } else {
    for (auto& t : b.terms) t.first *= c;
  }
  return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Validators.
// ---------------------------------------------------------------------------

ValidationResult validate_atom(const PAtom& a, const Filtration& F, double tol) {
  ValidationResult r;
  auto fail = [&](const char* why) {
    r.ok = false;
    r.diagnostic = why;
    return r;
  };
  if (!space_matches(a.values, F)) return fail("space mismatch");
  if (a.sigma1) {
    if (!level_measurable(a.values, F, 1, tol)) return fail("sigma1 atom not level-1 measurable");
    if (std::fabs(lp_norm(a.values, 1.0) - 1.0) > tol) return fail("sigma1 atom L1 norm differs from 1");
    return r;
  }
  if (!(a.p > 1)) return fail("exponent must exceed 1");
  if (a.k < 1 || a.k > F.depth()) return fail("level out of range");
  if (a.A.empty()) return fail("empty support set");
  if (!F.is_level_set(a.k, a.A)) return fail("support set not measurable at its level");
  if (!subset_of(support_points(a.values), a.A)) return fail("support escapes the set");
  if (linf_norm(cond_exp(a.values, F, a.k)) > tol) return fail("conditional mean not zero");
  double bound = std::pow(F.space()->measure(a.A), -1.0 / conjugate_exponent(a.p));
  if (!within_bound(lp_norm(a.values, a.p), bound, tol)) return fail("norm bound exceeded");
  return r;
}

Subatom make_subatom(int k_block, int k_j, std::vector<int> A, Rv values, double p) {
  Subatom s;
  s.k_block = k_block;
  s.k_j = k_j;
  s.A = sorted_unique(std::move(A));
  s.values = std::move(values);
  s.norm_p = p;
  s.measure_exp = -1.0 / conjugate_exponent(p);
  return s;
}

Subatom make_subatom_pq(int k_block, int k_j, std::vector<int> A, Rv values, double p0, double q) {
  if (!(p0 > 0) || !(p0 < 1)) throw std::invalid_argument("make_subatom_pq: p0 must lie in (0,1)");
  if (!(q > 1)) throw std::invalid_argument("make_subatom_pq: q must exceed 1");
  Subatom s;
  s.k_block = k_block;
  s.k_j = k_j;
  s.A = sorted_unique(std::move(A));
  s.values = std::move(values);
  s.norm_p = q;
  s.measure_exp = 1.0 - 1.0 / p0 - 1.0 / conjugate_exponent(q);
  return s;
}

ValidationResult validate_subatom(const Subatom& s, const Filtration& F, double tol) {
  ValidationResult r;
  auto fail = [&](const char* why) {
    r.ok = false;
    r.diagnostic = why;
    return r;
  };
  if (!space_matches(s.values, F)) return fail("space mismatch");
  if (s.k_block < 1 || s.k_block > F.depth()) return fail("block level out of range");
  if (s.k_j < s.k_block || s.k_j > F.depth()) return fail("support level out of range");
  if (s.A.empty()) return fail("empty support set");
  if (!F.is_level_set(s.k_j, s.A)) return fail("support set not measurable at its level");
  if (!subset_of(support_points(s.values), s.A)) return fail("support escapes the set");
  double bound = std::pow(F.space()->measure(s.A), s.measure_exp) / (s.k_j - s.k_block + 1);
  if (!within_bound(lp_norm(s.values, s.norm_p), bound, tol)) return fail("damped norm bound exceeded");
  return r;
}

bool subatom_l1_bound_check(const Subatom& s, const Filtration& F, double tol) {
  (void)F;
  return lp_norm(s.values, 1.0) <= 1.0 / (s.k_j - s.k_block + 1) + tol;
}

double AtomicBlock::cost() const {
  if (sigma1) return lp_norm(sigma1_values, 1.0);
  double c = 0;
  for (const auto& t : terms) c += std::fabs(t.first);
  return c;
}

Rv block_sum(const AtomicBlock& b, const Filtration& F) {
  if (b.sigma1) return b.sigma1_values;
  Rv out = zero_rv(F.space());
  for (const auto& t : b.terms)
    kernels::axpy(out.values.data(), t.first, t.second.values.values.data(), out.values.size());
  return out;
}

ValidationResult validate_block(const AtomicBlock& b, const Filtration& F, double tol) {
  ValidationResult r;
  auto fail = [&](const char* why) {
    r.ok = false;
    r.diagnostic = why;
    return r;
  };
  if (b.sigma1) {
    if (!space_matches(b.sigma1_values, F)) return fail("space mismatch");
    if (!level_measurable(b.sigma1_values, F, 1, tol)) return fail("values not level-1 measurable");
    return r;
  }
  if (b.k < 1 || b.k > F.depth()) return fail("cancellation level out of range");
  for (const auto& t : b.terms) {
    if (t.second.k_block != b.k) return fail("subatom bound tied to a different cancellation level");
    ValidationResult sub = validate_subatom(t.second, F, tol);
    if (!sub.ok) {
      r.ok = false;
      r.diagnostic = "subatom: " + sub.diagnostic;
      return r;
    }
  }
  if (linf_norm(cond_exp(block_sum(b, F), F, b.k)) > tol) return fail("block conditional mean not zero");
  return r;
}

// ---------------------------------------------------------------------------
// Constructions.
// ---------------------------------------------------------------------------

AtomicBlock decompose_delta_indicator(const std::vector<int>& A0, const Filtration& F, int k,
                                      double p) {
  if (A0.empty()) throw std::invalid_argument("decompose_delta_indicator: empty set");
  if (k < 2 || k > F.depth()) throw std::out_of_range("decompose_delta_indicator: level must be in [2, depth]");
  Rv chi = zero_rv(F.space());
  for (int i : A0) {
    if (i < 0 || i >= F.points()) throw std::out_of_range("decompose_delta_indicator: point out of range");
    chi[i] = 1.0;
  }
  Rv ek = cond_exp(chi, F, k);
  Rv ekm = cond_exp(chi, F, k - 1);

  AtomicBlock block;
  block.k = k - 1;
  if (linf_norm(rv_sub(ek, ekm)) <= 1e-12) return block;

  // level sets of E_k chi and E_{k-1} chi over the bands (1/(j+1), 1/j]
  auto banded_terms = [&](const Rv& e, int level, double coeff_over_j, double sign) {
    std::map<long long, std::vector<int>> bands;  // band index -> block ids
    const int B = F.block_count(level);
    for (int b = 0; b < B; ++b) {
      double v = e[F.block_points(level, b).front()];
      if (v <= 1e-12) continue;
      bands[inverse_band(v)].push_back(b);
    }
    for (const auto& [j, blocks] : bands) {
      std::vector<int> A;
      for (int b : blocks) {
        const auto& bp = F.block_points(level, b);
        A.insert(A.end(), bp.begin(), bp.end());
      }
      A = sorted_unique(std::move(A));
      double mu = F.space()->measure(A);
      double lambda = (coeff_over_j / static_cast<double>(j)) * mu;
      Rv vals = zero_rv(F.space());
      for (int i : A) vals[i] = e[i] / lambda;
      block.terms.emplace_back(sign * lambda, make_subatom(k - 1, level, std::move(A), std::move(vals), p));
    }
  };
  banded_terms(ek, k, 2.0, +1.0);
  banded_terms(ekm, k - 1, 1.0, -1.0);
  return block;
}

std::pair<Rv, Rv> davis_split(const Rv& f, const Filtration& F) {
  if (!space_matches(f, F)) throw std::invalid_argument("davis_split: variable not on the filtration's space");
  Rv h = zero_rv(f.space);
  Rv d1 = mart_diff(f, F, 1);
  std::vector<double> running_max(static_cast<std::size_t>(f.size()));
  for (int i = 0; i < f.size(); ++i) running_max[static_cast<std::size_t>(i)] = std::fabs(d1[i]);
  for (int k = 2; k <= F.depth(); ++k) {
    Rv dk = mart_diff(f, F, k);
    Rv t = zero_rv(f.space);
    for (int i = 0; i < f.size(); ++i)
      if (std::fabs(dk[i]) > 2.0 * running_max[static_cast<std::size_t>(i)]) t[i] = dk[i];
    Rv dh = rv_sub(t, cond_exp(t, F, k - 1));
    h = rv_add(h, dh);
    for (int i = 0; i < f.size(); ++i)
      running_max[static_cast<std::size_t>(i)] = std::max(running_max[static_cast<std::size_t>(i)], std::fabs(dk[i]));
  }
  return {rv_sub(f, h), h};
}

H1AtomList h1_atomic_decompose(const Rv& g, const Filtration& F, double p) {
  if (!space_matches(g, F)) throw std::invalid_argument("h1_atomic_decompose: variable not on the filtration's space");
  H1AtomList out;
  if (linf_norm(g) <= 1e-12) return out;

  if (auto single = detect_single_atom(g, F, p)) {
    PAtom a;
    a.sigma1 = single->sigma1;
    a.k = single->k;
    a.A = std::move(single->A);
    a.values = g;
    a.p = p;
    out.atoms.emplace_back(1.0, std::move(a));
    return out;
  }

  const double pp = conjugate_exponent(p);
  Rv e1 = cond_exp(g, F, 1);
  double lam0 = lp_norm(e1, 1.0);
  if (lam0 > 1e-12) {
    PAtom a;
    a.sigma1 = true;
    a.values = rv_scale(e1, 1.0 / lam0);
    a.p = p;
    out.atoms.emplace_back(lam0, std::move(a));
  }

  // truncated conditioned square function, grown level by level
  std::vector<double> s2(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) s2[static_cast<std::size_t>(i)] = e1[i] * e1[i];
  for (int j = 2; j <= F.depth(); ++j) {
    Rv dj = mart_diff(g, F, j);
    Rv djsq = dj;
    for (double& x : djsq.values) x = x * x;
    Rv cond = cond_exp(djsq, F, j - 1);
    for (int i = 0; i < g.size(); ++i) s2[static_cast<std::size_t>(i)] += cond[i];

    // windows over the dyadic bands of s_(j), each level-(j-1) measurable
    std::map<int, std::vector<int>> windows;  // band -> block ids at level j-1
    const int B = F.block_count(j - 1);
    for (int b = 0; b < B; ++b) {
      double s = std::sqrt(std::max(s2[static_cast<std::size_t>(F.block_points(j - 1, b).front())], 0.0));
      if (s <= 1e-12) continue;  // conditioned square vanishes, so does dg_j there
      windows[dyadic_band(s)].push_back(b);
    }
    for (const auto& [m, blocks] : windows) {
      std::vector<int> D;
      for (int b : blocks) {
        const auto& bp = F.block_points(j - 1, b);
        D.insert(D.end(), bp.begin(), bp.end());
      }
      D = sorted_unique(std::move(D));
      Rv u = zero_rv(g.space);
      for (int i : D) u[i] = dj[i];
      double unorm = lp_norm(u, p);
      if (unorm <= 1e-12) continue;
      double lambda = unorm * std::pow(F.space()->measure(D), 1.0 / pp);
      PAtom a;
      a.k = j - 1;
      a.A = D;
      a.values = rv_scale(u, 1.0 / lambda);
      a.p = p;
      out.atoms.emplace_back(lambda, std::move(a));
    }
  }

  // whatever the last level cannot see becomes one saturated level-K atom
  Rv r = rv_sub(g, cond_exp(g, F, F.depth()));
  if (linf_norm(r) > 1e-12) {
    std::vector<int> A = level_cover(F, F.depth(), support_points(r));
    double lambda = lp_norm(r, p) * std::pow(F.space()->measure(A), 1.0 / pp);
    PAtom a;
    a.k = F.depth();
    a.A = std::move(A);
    a.values = rv_scale(r, 1.0 / lambda);
    a.p = p;
    out.atoms.emplace_back(lambda, std::move(a));
  }
  return out;
}

DecompositionReport decompose_H1_to_blocks(const Rv& f, const Filtration& F, double p) {
  if (!space_matches(f, F)) throw std::invalid_argument("decompose_H1_to_blocks: variable not on the filtration's space");
  DecompositionReport rep;
  rep.residual = f;
  if (linf_norm(f) <= 1e-12) return rep;

  const double pp = conjugate_exponent(p);

  if (auto single = detect_single_atom(f, F, p)) {
    AtomicBlock b;
    if (single->sigma1) {
      b.sigma1 = true;
      b.sigma1_values = f;
    } else {
      b.k = single->k;
      b.terms.emplace_back(1.0, make_subatom(single->k, single->k, std::move(single->A), f, p));
    }
    rep.blocks.push_back(std::move(b));
  } else {
    Rv h = davis_split(f, F).second;
    Rv g = rv_sub(cond_exp(f, F, F.depth()), h);

    for (auto& [lambda, atom] : h1_atomic_decompose(g, F, p).atoms) {
      AtomicBlock b;
      if (atom.sigma1) {
        b.sigma1 = true;
        b.sigma1_values = rv_scale(atom.values, lambda);
      } else {
        b.k = atom.k;
        b.terms.emplace_back(lambda, make_subatom(atom.k, atom.k, std::move(atom.A), std::move(atom.values), p));
      }
      rep.blocks.push_back(std::move(b));
    }

    // loud part: dh_k is constant on level-k blocks; grouping equal values
    // gives dh_k = sum_j beta_j Delta_k(chi_{B_j}) exactly
    for (int k = 2; k <= F.depth(); ++k) {
      Rv dh = mart_diff(h, F, k);
      std::map<double, std::vector<int>> groups;  // value -> points
      const int B = F.block_count(k);
      for (int b = 0; b < B; ++b) {
        const auto& bp = F.block_points(k, b);
        double beta = dh[bp.front()];
        if (std::fabs(beta) <= 1e-12) continue;
        auto& pts = groups[beta];
        pts.insert(pts.end(), bp.begin(), bp.end());
      }
      for (const auto& [beta, pts] : groups) {
        AtomicBlock blk = decompose_delta_indicator(sorted_unique(pts), F, k, p);
        if (blk.terms.empty()) continue;
        rep.blocks.push_back(scale_block(std::move(blk), beta));
      }
    }

    Rv r = rv_sub(f, cond_exp(f, F, F.depth()));
    if (linf_norm(r) > 1e-12) {
      std::vector<int> A = level_cover(F, F.depth(), support_points(r));
      double lambda = lp_norm(r, p) * std::pow(F.space()->measure(A), 1.0 / pp);
      AtomicBlock b;
      b.k = F.depth();
      b.terms.emplace_back(lambda, make_subatom(F.depth(), F.depth(), std::move(A), rv_scale(r, 1.0 / lambda), p));
      rep.blocks.push_back(std::move(b));
    }
  }

  Rv total = zero_rv(f.space);
  for (const auto& b : rep.blocks) {
    total = rv_add(total, block_sum(b, F));
    rep.cost += b.cost();
  }
  rep.residual = rv_sub(f, total);
  return rep;
}

// ---------------------------------------------------------------------------
// Exact gauge at p = infinity.
// ---------------------------------------------------------------------------

double atb_norm_lp(const Rv& f, const Filtration& F, double p) {
  if (!std::isinf(p)) throw std::invalid_argument("atb_norm_lp: only the p = infinity gauge is exact");
  if (!space_matches(f, F)) throw std::invalid_argument("atb_norm_lp: variable not on the filtration's space");
  const int n = F.points();
  if (n > 8) throw std::invalid_argument("atb_norm_lp: exact gauge limited to 8 points");

  const int K = F.depth();
  const int BK = F.block_count(K);

  // candidate supports: nonempty unions of level-K blocks
  struct Support {
    std::vector<int> pts;
    double mu;
    int min_level;
  };
  std::vector<Support> supports;
  for (int mask = 1; mask < (1 << BK); ++mask) {
    Support s;
    for (int b = 0; b < BK; ++b)
      if (mask & (1 << b)) {
        const auto& bp = F.block_points(K, b);
        s.pts.insert(s.pts.end(), bp.begin(), bp.end());
      }
    std::sort(s.pts.begin(), s.pts.end());
    s.mu = F.space()->measure(s.pts);
    s.min_level = F.min_measurable_level(s.pts);
    supports.push_back(std::move(s));
  }

  // dictionary: per cancellation level, extreme infinity-subatoms are the
  // +/- sign patterns at the finest admissible scale; the first point of a
  // support is pinned to + since lambdas are sign-split anyway
  struct Column {
    int level;
    std::vector<std::pair<int, double>> entries;  // (point, value)
  };
  std::vector<Column> dict;
  for (int k = 1; k <= K; ++k) {
    for (const auto& s : supports) {
      int kj = std::max(k, s.min_level);
      double scale = 1.0 / (s.mu * (kj - k + 1));
      const int npts = static_cast<int>(s.pts.size());
      for (int pat = 0; pat < (1 << (npts - 1)); ++pat) {
        Column c;
        c.level = k;
        c.entries.reserve(static_cast<std::size_t>(npts));
        c.entries.emplace_back(s.pts[0], scale);
        for (int t = 1; t < npts; ++t)
          c.entries.emplace_back(s.pts[static_cast<std::size_t>(t)],
                                 (pat & (1 << (t - 1))) ? -scale : scale);
        dict.push_back(std::move(c));
      }
    }
  }

  // rows: per-point reconstruction, then per-(level, block) cancellation
  std::vector<int> cancel_row_base(static_cast<std::size_t>(K + 1), 0);
  int rows = n;
  for (int k = 1; k <= K; ++k) {
    cancel_row_base[static_cast<std::size_t>(k)] = rows;
    rows += F.block_count(k);
  }
  const int B1 = F.block_count(1);
  const int cols = 2 * B1 + 2 * static_cast<int>(dict.size());
  DenseLp lp(rows, cols);

  for (int b = 0; b < B1; ++b) {
    double mu = F.block_measure(1, b);
    lp.set_cost(2 * b, mu);
    lp.set_cost(2 * b + 1, mu);
    for (int i : F.block_points(1, b)) {
      lp.set_entry(i, 2 * b, 1.0);
      lp.set_entry(i, 2 * b + 1, -1.0);
    }
  }
  for (std::size_t d = 0; d < dict.size(); ++d) {
    const int cp = 2 * B1 + 2 * static_cast<int>(d);
    lp.set_cost(cp, 1.0);
    lp.set_cost(cp + 1, 1.0);
    const auto& c = dict[d];
    for (const auto& [i, v] : c.entries) {
      lp.set_entry(i, cp, v);
      lp.set_entry(i, cp + 1, -v);
    }
    // cancellation rows: integral over each block of the column's level
    std::map<int, double> block_integrals;
    for (const auto& [i, v] : c.entries)
      block_integrals[F.block_of(c.level, i)] += F.space()->weight(i) * v;
    for (const auto& [blk, integ] : block_integrals) {
      int row = cancel_row_base[static_cast<std::size_t>(c.level)] + blk;
      lp.set_entry(row, cp, integ);
      lp.set_entry(row, cp + 1, -integ);
    }
  }
  for (int i = 0; i < n; ++i) lp.set_rhs(i, f[i]);

  LpResult res = lp.solve();
  if (res.status != LpStatus::optimal)
    throw std::runtime_error("atb_norm_lp: solver failed on a feasible bounded program");
  return res.objective;
}

// ---------------------------------------------------------------------------
// Pairings and certified bounds.
// ---------------------------------------------------------------------------

double pairing(const Rv& f, const Rv& g) { return inner(f, g); }

std::pair<double, double> duality_bound_check_p2(const AtomicBlock& b, const Rv& phi,
                                                 const Filtration& F) {
  if (!space_matches(phi, F)) throw std::invalid_argument("duality_bound_check_p2: variable not on the filtration's space");
  if (b.sigma1) {
    double lhs = std::fabs(pairing(b.sigma1_values, phi));
    double rhs = b.cost() * linf_norm(cond_exp(phi, F, 1));
    return {lhs, rhs};
  }
  for (const auto& t : b.terms)
    if (std::fabs(t.second.norm_p - 2.0) > 1e-12)
      throw std::invalid_argument("duality_bound_check_p2: block must carry exponent 2");
  double lhs = std::fabs(pairing(block_sum(b, F), phi));
  double sup_diff = 0;
  for (int k = 1; k <= F.depth(); ++k) sup_diff = std::max(sup_diff, linf_norm(mart_diff(phi, F, k)));
  double rhs = b.cost() * (bmo_norm(phi, F, 2.0) + sup_diff);
  return {lhs, rhs};
}

double hp_atb_quasinorm_upper(const Rv& f, const Filtration& F, double p0, double q,
                              const std::vector<AtomicBlock>& blocks) {
  if (!(p0 > 0) || !(p0 < 1)) throw std::invalid_argument("hp_atb_quasinorm_upper: p0 must lie in (0,1)");
  if (!(q > 1)) throw std::invalid_argument("hp_atb_quasinorm_upper: q must exceed 1");
  const double e = 1.0 - 1.0 / p0 - 1.0 / conjugate_exponent(q);

  double total = 0;
  Rv sum = zero_rv(F.space());
  for (const auto& b : blocks) {
    double cost_i;
    if (b.sigma1) {
      ValidationResult v = validate_block(b, F);
      if (!v.ok) throw std::invalid_argument("hp_atb_quasinorm_upper: " + v.diagnostic);
      double s = 0;
      for (int i = 0; i < b.sigma1_values.size(); ++i)
        s += F.space()->weight(i) * std::pow(std::fabs(b.sigma1_values[i]), p0);
      cost_i = std::pow(s, 1.0 / p0);
    } else {
      for (const auto& t : b.terms)
        if (std::fabs(t.second.norm_p - q) > 1e-12 || std::fabs(t.second.measure_exp - e) > 1e-12)
          throw std::invalid_argument("hp_atb_quasinorm_upper: subatom certified at the wrong scale");
      ValidationResult v = validate_block(b, F);
      if (!v.ok) throw std::invalid_argument("hp_atb_quasinorm_upper: " + v.diagnostic);
      cost_i = b.cost();
    }
    total += std::pow(cost_i, p0);
    sum = rv_add(sum, block_sum(b, F));
  }
  if (linf_norm(rv_sub(sum, f)) > 1e-9)
    throw std::invalid_argument("hp_atb_quasinorm_upper: decomposition does not reconstruct the target");
  return std::pow(total, 1.0 / p0);
}

}  // namespace martblocks
