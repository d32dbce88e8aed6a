#include "martblocks/medians.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace martblocks {

namespace {

constexpr double kZero = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double conj_of(double pprime) {
  if (pprime < 1.0) throw std::invalid_argument("exponent must be >= 1");
  if (pprime == 1.0) return kInf;
  if (std::isinf(pprime)) return 1.0;
  return pprime / (pprime - 1.0);
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool on_space(const Rv& f, const Filtration& F) {
  if (!f.space) return false;
  return f.space == F.space() || f.space->weights() == F.space()->weights();
}

void require_level_set(const std::vector<int>& A, const Filtration& F, int k) {
  if (A.empty() || !F.is_level_set(k, A))
    throw std::invalid_argument("support is not a nonempty level set");
}

double linf_on(const Rv& f, const std::vector<int>& A) {
  double m = 0;
  for (int i : A) m = std::max(m, std::fabs(f.values[i]));
  return m;
}

// Attained values v on the block with mu{f < v} <= mu/2 and mu{f > v} <=
// mu/2, ascending. Nonempty: scanning upward, the first value passing the
// right-tail test also passes the left-tail test, because its predecessor
// failed the right one.
std::vector<double> valid_medians_on_block(const Rv& f, const Filtration& F, int k, int block) {
  std::map<double, double> acc;  // value -> mass
  for (int i : F.block_points(k, block)) acc[f.values[i]] += F.space()->weight(i);
  double total = 0;
  for (const auto& [v, w] : acc) total += w;
  double half = total / 2.0;
  double tol = 1e-12 * std::max(1.0, total);

  std::vector<double> out;
  double below = 0;
  for (const auto& [v, w] : acc) {
    double above = total - below - w;
    if (below <= half + tol && above <= half + tol) out.push_back(v);
    below += w;
  }
  return out;
}

}  // namespace

Rv cond_median(const Rv& f, const Filtration& F, int k) {
  if (!on_space(f, F)) throw std::invalid_argument("variable not on the filtered space");
  if (k < 1 || k > F.depth()) throw std::out_of_range("level out of range");
  Rv out = f;
  for (int b = 0; b < F.block_count(k); ++b) {
    double alpha = valid_medians_on_block(f, F, k, b).front();
    for (int i : F.block_points(k, b)) out.values[i] = alpha;
  }
  return out;
}

std::vector<double> cond_median_all(const Rv& f, const Filtration& F, int k, int block) {
  if (!on_space(f, F)) throw std::invalid_argument("variable not on the filtered space");
  if (k < 1 || k > F.depth()) throw std::out_of_range("level out of range");
  if (block < 0 || block >= F.block_count(k)) throw std::out_of_range("block out of range");
  return valid_medians_on_block(f, F, k, block);
}

MedianSequence::MedianSequence(Rv f_, FiltrationPtr F_) : f(std::move(f_)), F(std::move(F_)) {
  if (!on_space(f, *F)) throw std::invalid_argument("variable not on the filtered space");
  alphas.reserve(static_cast<size_t>(F->depth()));
  for (int k = 1; k <= F->depth(); ++k) alphas.push_back(cond_median(f, *F, k));
}

const Rv& MedianSequence::alpha(int k) const {
  if (k < 1 || k > static_cast<int>(alphas.size())) throw std::out_of_range("level out of range");
  return alphas[static_cast<size_t>(k - 1)];
}

std::pair<Rv, bool> cm_lemma_check(const Rv& f, const Filtration& F, int k,
                                   const std::vector<int>& A, double tol) {
  auto As = sorted_unique(A);
  require_level_set(As, F, k);
  if (!on_space(f, F)) throw std::invalid_argument("variable not on the filtered space");
  Rv alpha = cond_median(f, F, k);
  Rv chi = zero_rv(F.space());
  for (int i : As)
    if (f.values[i] <= alpha.values[i]) chi.values[i] = 1.0;
  Rv lhs = cond_exp(chi, F, k);
  bool ok = true;
  for (int i : As)
    if (lhs.values[i] < 0.5 - tol) ok = false;
  return {lhs, ok};
}

double bmo_alpha_norm(const Rv& f, const Filtration& F, const MedianSequence& ms, double pprime) {
  if (!on_space(f, F)) throw std::invalid_argument("variable not on the filtered space");
  if (pprime < 1.0) throw std::invalid_argument("exponent must be >= 1");
  const int n = F.points();
  double t1 = linf_norm(cond_exp(f, F, 1));
  double t2 = 0;
  for (int k = 1; k <= F.depth(); ++k) {
    const Rv& a = ms.alpha(k);
    Rv g = zero_rv(F.space());
    for (int i = 0; i < n; ++i) g.values[i] = std::pow(std::fabs(f.values[i] - a.values[i]), pprime);
    Rv e = cond_exp(g, F, k);
    for (int i = 0; i < n; ++i) t2 = std::max(t2, std::pow(e.values[i], 1.0 / pprime));
  }
  double t3 = 0;
  for (int k = 2; k <= F.depth(); ++k)
    t3 = std::max(t3, linf_norm(rv_sub(ms.alpha(k), ms.alpha(k - 1))));
  return std::max({t1, t2, t3});
}

MedianBlock build_block_power(const std::vector<int>& A, const Rv& f, const Filtration& F, int k,
                              double pprime) {
  auto As = sorted_unique(A);
  require_level_set(As, F, k);
  if (!on_space(f, F)) throw std::invalid_argument("variable not on the filtered space");
  double p = conj_of(pprime);

  Rv alpha = cond_median(f, F, k);
  Rv diff = rv_sub(f, alpha);
  MedianBlock out;
  out.block.k = k;
  out.b1 = zero_rv(F.space());
  out.b2 = zero_rv(F.space());
  if (linf_on(diff, As) <= kZero) return out;  // f matches its median on A

  double P = 0, M = 0;
  for (int i : As) {
    double d = diff.values[i];
    double w = F.space()->weight(i);
    if (d > 0) P += w * std::pow(d, pprime);
    if (d < 0) M += w * std::pow(-d, pprime);
  }
  bool mirror = P < M;  // work on the heavier side; the mirror negates f - alpha
  double power = std::max(P, M);

  Rv b1 = zero_rv(F.space());
  Rv chi2 = zero_rv(F.space());
  for (int i : As) {
    double d = mirror ? -diff.values[i] : diff.values[i];
    if (d > 0)
      b1.values[i] = (mirror ? -1.0 : 1.0) * std::pow(d, pprime - 1.0);
    else
      chi2.values[i] = 1.0;  // complementary side, mass >= half of each block
  }
  Rv eb1 = cond_exp(b1, F, k);
  Rv echi = cond_exp(chi2, F, k);
  Rv b2 = zero_rv(F.space());
  for (int i = 0; i < F.points(); ++i)
    if (chi2.values[i] > 0.5 && echi.values[i] > 0) b2.values[i] = eb1.values[i] / echi.values[i];

  Rv b = rv_sub(b1, b2);
  double muA = F.space()->measure(As);
  double cert = (1.0 + std::pow(2.0, 1.0 / pprime)) * std::pow(muA, 1.0 / pprime) *
                (std::isinf(p) ? 1.0 : std::pow(power, 1.0 / p));
  out.block.terms.push_back({cert, make_subatom(k, k, As, rv_scale(b, 1.0 / cert), p)});
  out.cost_certificate = cert;
  out.b1 = b1;
  out.b2 = b2;
  return out;
}

MedianBlock build_block_mediandiff(const std::vector<int>& A, const Rv& f, const Filtration& F,
                                   int k, double pprime) {
  auto As = sorted_unique(A);
  if (k < 2) throw std::out_of_range("needs a coarser level below");
  require_level_set(As, F, k);
  if (!on_space(f, F)) throw std::invalid_argument("variable not on the filtered space");
  double p = conj_of(pprime);

  Rv alpha = cond_median(f, F, k - 1);  // the coarser median
  Rv g0 = zero_rv(F.space());
  Rv absg = zero_rv(F.space());
  for (int i : As) {
    double d = f.values[i] - alpha.values[i];
    double m = std::pow(std::fabs(d), pprime - 1.0);
    g0.values[i] = (d > 0 ? m : (d < 0 ? -m : 0.0));
    absg.values[i] = (d != 0 ? m : 0.0);
  }
  MedianBlock out;
  out.block.k = k - 1;
  out.b1 = g0;
  out.b2 = zero_rv(F.space());
  if (linf_norm(g0) <= kZero) return out;

  double muA = F.space()->measure(As);
  double X = std::pow(muA, 1.0 / pprime) * lp_norm(g0, p);
  double lam1 = 2.0 * X;
  out.block.terms.push_back({lam1, make_subatom(k - 1, k, As, rv_scale(g0, 1.0 / lam1), p)});

  Rv eg0 = cond_exp(g0, F, k - 1);
  out.b2 = eg0;
  Rv G = cond_exp(absg, F, k - 1);

  // dyadic slices of G: a (k-1)-block with value in (2^m, 2^{m+1}] pays
  // 2^{m+1} per unit mass; |E_{k-1} g0| <= G certifies the bound with no
  // damping (k_j = k-1)
  std::map<int, std::vector<int>> slices;
  for (int b = 0; b < F.block_count(k - 1); ++b) {
    const auto& pts = F.block_points(k - 1, b);
    double v = G.values[pts[0]];
    if (v <= kZero) continue;
    if (linf_on(eg0, pts) <= kZero) continue;  // zero piece, skip its cost
    int m = static_cast<int>(std::floor(std::log2(v) - 1e-12));
    auto& s = slices[m];
    s.insert(s.end(), pts.begin(), pts.end());
  }
  for (auto& [m, pts] : slices) {
    double cap = std::ldexp(1.0, m + 1);
    auto sup = sorted_unique(pts);
    double lam = cap * F.space()->measure(sup);
    Rv vals = zero_rv(F.space());
    for (int i : sup) vals.values[i] = eg0.values[i] / lam;
    out.block.terms.push_back({-lam, make_subatom(k - 1, k - 1, sup, vals, p)});
  }
  out.cost_certificate = 4.0 * X;
  return out;
}

MedianBlock build_block_sign(const std::vector<int>& A, const Rv& f, const Filtration& F, int k) {
  auto As = sorted_unique(A);
  require_level_set(As, F, k);
  if (!on_space(f, F)) throw std::invalid_argument("variable not on the filtered space");

  Rv alpha = cond_median(f, F, k);
  Rv b1 = zero_rv(F.space());
  Rv chiT = zero_rv(F.space());
  for (int i : As) {
    // the median is an attained value, so ties are exact comparisons
    if (f.values[i] > alpha.values[i])
      b1.values[i] = 1.0;
    else if (f.values[i] < alpha.values[i])
      b1.values[i] = -1.0;
    else
      chiT.values[i] = 1.0;
  }
  MedianBlock out;
  out.block.k = k;
  out.b1 = b1;
  out.b2 = zero_rv(F.space());
  if (linf_norm(b1) <= kZero) return out;  // f constant on each block of A

  Rv eb1 = cond_exp(b1, F, k);
  Rv echi = cond_exp(chiT, F, k);
  Rv b2 = zero_rv(F.space());
  for (int i = 0; i < F.points(); ++i)
    if (chiT.values[i] > 0.5 && echi.values[i] > 0) b2.values[i] = eb1.values[i] / echi.values[i];
  out.b2 = b2;

  double muA = F.space()->measure(As);
  double n1 = linf_norm(b1);
  out.block.terms.push_back(
      {n1 * muA, make_subatom(k, k, As, rv_scale(b1, 1.0 / (n1 * muA)), kInf)});
  double n2 = linf_norm(b2);
  if (n2 > kZero)
    out.block.terms.push_back(
        {n2 * muA, make_subatom(k, k, As, rv_scale(b2, -1.0 / (n2 * muA)), kInf)});
  out.cost_certificate = 5.0 * muA;
  return out;
}

MedianBlock build_block_indicator(const std::vector<int>& A, const Filtration& F, int k, int N) {
  auto As = sorted_unique(A);
  if (k < 2) throw std::out_of_range("needs a coarser level below");
  if (N < 1) throw std::invalid_argument("grid count must be positive");
  require_level_set(As, F, k);

  Rv chi = zero_rv(F.space());
  for (int i : As) chi.values[i] = 1.0;
  Rv G = cond_exp(chi, F, k - 1);
  Rv b = rv_sub(chi, G);

  MedianBlock out;
  out.block.k = k - 1;
  out.b1 = chi;
  out.b2 = G;
  if (linf_norm(b) <= kZero) {
    out.b1 = zero_rv(F.space());
    out.b2 = zero_rv(F.space());
    return out;
  }

  double muA = F.space()->measure(As);
  double lam0 = 2.0 * muA;
  out.block.terms.push_back({lam0, make_subatom(k - 1, k, As, rv_scale(chi, 1.0 / lam0), kInf)});

  double cert = muA;
  // uniform grid slices of G over ((j-1)/N, j/N]
  std::map<int, std::vector<int>> slices;
  for (int bix = 0; bix < F.block_count(k - 1); ++bix) {
    const auto& pts = F.block_points(k - 1, bix);
    double v = G.values[pts[0]];
    if (v <= kZero) continue;
    int j = static_cast<int>(std::ceil(v * N - 1e-9));
    auto& s = slices[j];
    s.insert(s.end(), pts.begin(), pts.end());
  }
  for (auto& [j, pts] : slices) {
    auto sup = sorted_unique(pts);
    double cap = linf_on(G, sup);
    double lam = cap * F.space()->measure(sup);
    Rv vals = zero_rv(F.space());
    for (int i : sup) vals.values[i] = G.values[i] / lam;
    out.block.terms.push_back({-lam, make_subatom(k - 1, k - 1, sup, vals, kInf)});
    cert += lam;
  }
  out.cost_certificate = cert;
  return out;
}

WeakAtom weak_atom(const Rv& phi, const Filtration& F, int k) {
  if (!on_space(phi, F)) throw std::invalid_argument("variable not on the filtered space");
  if (k < 2 || k > F.depth()) throw std::invalid_argument("level out of range");
  if (linf_norm(phi) > 1.0 + 1e-12) throw std::invalid_argument("sup norm exceeds one");
  std::vector<int> A;
  for (int b = 0; b < F.block_count(k); ++b) {
    const auto& pts = F.block_points(k, b);
    double v = phi.values[pts[0]];
    for (int i : pts)
      if (std::fabs(phi.values[i] - v) > 1e-10)
        throw std::invalid_argument("not measurable at the level");
    if (std::fabs(v) > kZero) A.insert(A.end(), pts.begin(), pts.end());
  }
  if (A.empty()) throw std::invalid_argument("zero variable has no weak atom");
  WeakAtom out;
  out.k = k;
  out.phi = phi;
  out.A = sorted_unique(A);
  double muA = F.space()->measure(out.A);
  out.w = rv_scale(rv_sub(phi, cond_exp(phi, F, k - 1)), 1.0 / muA);
  return out;
}

WeakAtomSplit weak_atom_split(const Rv& xi, const std::vector<int>& A, const Filtration& F,
                              int k) {
  auto As = sorted_unique(A);
  if (k < 2 || k > F.depth()) throw std::invalid_argument("level out of range");
  if (!on_space(xi, F)) throw std::invalid_argument("variable not on the filtered space");
  if (As.empty()) throw std::invalid_argument("empty support");
  if (sorted_unique(F.block_points(k, F.block_of(k, As[0]))) != As)
    throw std::invalid_argument("A is not a single level-k cell");
  if (linf_norm(xi) > 1.0 + 1e-12) throw std::invalid_argument("sup norm exceeds one");

  auto B = sorted_unique(F.block_points(k - 1, F.block_of(k - 1, As[0])));
  double muA = F.space()->measure(As);
  double muB = F.space()->measure(B);
  double integ = 0;
  for (int i : As) integ += F.space()->weight(i) * xi.values[i];
  double avgA = integ / muA;  // E_k(chi_A xi) on A
  double avgB = integ / muB;  // E_{k-1}(chi_A xi) on B

  std::vector<int> BmA;
  for (int i : B)
    if (!std::binary_search(As.begin(), As.end(), i)) BmA.push_back(i);

  WeakAtomSplit out;
  out.a1 = zero_rv(F.space());
  out.a2 = zero_rv(F.space());
  for (int i : BmA) out.a1.values[i] = -avgB / muA;
  for (int i : As) out.a2.values[i] = (avgA - avgB) / muA;

  double n1 = linf_norm(out.a1);
  double n2 = linf_norm(out.a2);
  double muBmA = F.space()->measure(BmA);
  out.certificate = 2.0 * muBmA * n1 + 2.0 * muA * n2;

  out.block.k = k - 1;
  if (!BmA.empty() && n1 > kZero) {
    double lam = 2.0 * n1 * muBmA;
    out.block.terms.push_back(
        {lam, make_subatom(k - 1, k, BmA, rv_scale(out.a1, 1.0 / lam), kInf)});
  }
  if (n2 > kZero) {
    double lam = 2.0 * n2 * muA;
    out.block.terms.push_back({lam, make_subatom(k - 1, k, As, rv_scale(out.a2, 1.0 / lam), kInf)});
  }
  return out;
}

}  // namespace martblocks
