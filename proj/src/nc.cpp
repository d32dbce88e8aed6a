#include "martblocks/nc.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace martblocks {

namespace {

constexpr double kTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double scale) { return kTol * std::max(1.0, scale); }

bool near(const Op& x, const Op& y, double scale) { return (x - y).norm() <= rel(scale); }

void check_square(const Op& x, int n, const char* what) {
  if (x.rows() != n || x.cols() != n) throw std::invalid_argument(std::string(what) + ": wrong dimension");
}

// V diag(g(lambda)) V^* for self-adjoint input; clamps roundoff negatives.
Op psd_sqrt(const Op& x) {
  Eigen::SelfAdjointEigenSolver<Op> es(x);
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) lam[i] = lam[i] > 0 ? std::sqrt(lam[i]) : 0.0;
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

double one_over_conj(double p) {
  // 1/p' = 1 - 1/p; p in [1, inf]
  return std::isinf(p) ? 1.0 : 1.0 - 1.0 / p;
}

}  // namespace

std::complex<double> nc_trace(const Op& x) {
  if (x.rows() != x.cols() || x.rows() == 0) throw std::invalid_argument("trace needs a square matrix");
  return x.trace() / static_cast<double>(x.rows());
}

TracialAlgebra::TracialAlgebra(int n_) : n(n_) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
}

Op TracialAlgebra::identity() const { return Op::Identity(n, n); }

NCFiltration::NCFiltration(int n, std::vector<NCLevel> levels, std::optional<Op> frame)
    : n_(n), levels_(std::move(levels)), frame_(std::move(frame)) {
  if (n_ < 1) throw std::invalid_argument("dimension must be positive");
  if (levels_.empty()) throw std::invalid_argument("need at least one level");
  for (size_t L = 0; L < levels_.size(); ++L) {
    if (const auto* pin = std::get_if<PinchLevel>(&levels_[L])) {
      if (pin->projections.empty()) throw std::invalid_argument("empty projection family");
      Op sum = Op::Zero(n_, n_);
      for (const Op& p : pin->projections) {
        check_square(p, n_, "projection");
        if (!near(p, p.adjoint(), 1.0) || !near(p * p, p, 1.0))
          throw std::invalid_argument("family member is not a projection");
        sum += p;
      }
      if (!near(sum, Op::Identity(n_, n_), 1.0))
        throw std::invalid_argument("projection family does not sum to the identity");
    } else {
      const auto& t = std::get<TensorLevel>(levels_[L]);
      if (t.left_dim < 1 || t.right_dim < 1 || t.left_dim * t.right_dim != n_)
        throw std::invalid_argument("tensor split does not match the dimension");
    }
  }
  if (frame_) {
    check_square(*frame_, n_, "frame");
    if (!near(*frame_ * frame_->adjoint(), Op::Identity(n_, n_), 1.0))
      throw std::invalid_argument("frame is not unitary");
  }
  // expectation axioms and nesting, checked on the matrix-unit basis
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) {
      Op e = Op::Zero(n_, n_);
      e(r, c) = 1.0;
      for (int k = 1; k <= depth(); ++k) {
        Op ek = apply_raw(k, e);
        if (!near(apply_raw(k, ek), ek, 1.0)) throw std::invalid_argument("level is not idempotent");
        if (std::abs(ek.trace() - e.trace()) > kTol * n_)
          throw std::invalid_argument("level does not preserve the trace");
        if (k < depth()) {
          Op fine = apply_raw(k + 1, e);
          if (!near(apply_raw(k, fine), ek, 1.0) || !near(apply_raw(k + 1, ek), ek, 1.0))
            throw std::invalid_argument("levels are not nested");
        }
      }
    }
}

const NCLevel& NCFiltration::level(int k) const {
  if (k < 1 || k > depth()) throw std::out_of_range("level out of range");
  return levels_[static_cast<size_t>(k - 1)];
}

Op NCFiltration::apply_raw(int k, const Op& x) const {
  const NCLevel& L = levels_[static_cast<size_t>(k - 1)];
  if (const auto* pin = std::get_if<PinchLevel>(&L)) {
    Op out = Op::Zero(n_, n_);
    for (const Op& p : pin->projections) out += p * x * p;
    return out;
  }
  const auto& t = std::get<TensorLevel>(L);
  const int a = t.left_dim, b = t.right_dim;
  Op z = Op::Zero(a, a);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) {
      std::complex<double> s = 0;
      for (int u = 0; u < b; ++u) s += x(i * b + u, j * b + u);
      z(i, j) = s / static_cast<double>(b);
    }
  Op out = Op::Zero(n_, n_);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      for (int u = 0; u < b; ++u) out(i * b + u, j * b + u) = z(i, j);
  return out;
}

Op NCFiltration::apply(int k, const Op& x) const {
  if (k < 0 || k > depth()) throw std::out_of_range("level out of range");
  if (k == 0) return Op::Zero(n_, n_);
  if (!frame_) return apply_raw(k, x);
  const Op& U = *frame_;
  return U * apply_raw(k, U.adjoint() * x * U) * U.adjoint();
}

Op nc_cond_exp(const Op& x, const NCFiltration& F, int k) {
  check_square(x, F.dim(), "operand");
  return F.apply(k, x);
}

Op nc_mart_diff(const Op& x, const NCFiltration& F, int k) {
  check_square(x, F.dim(), "operand");
  if (k < 1 || k > F.depth()) throw std::out_of_range("level out of range");
  return F.apply(k, x) - F.apply(k - 1, x);
}

double schatten_norm(const Op& x, double p) {
  if (x.rows() != x.cols() || x.rows() == 0) throw std::invalid_argument("square matrix expected");
  if (!(p >= 1.0)) throw std::invalid_argument("exponent must be >= 1");
  Eigen::JacobiSVD<Op> svd(x);
  const auto& sv = svd.singularValues();
  if (std::isinf(p)) return sv.size() ? sv[0] : 0.0;
  double acc = 0;
  for (int i = 0; i < sv.size(); ++i) acc += std::pow(sv[i], p);
  return std::pow(acc / static_cast<double>(x.rows()), 1.0 / p);
}

double col_H1_norm(const Op& f, const NCFiltration& F) {
  check_square(f, F.dim(), "operand");
  Op acc = Op::Zero(F.dim(), F.dim());
  for (int k = 1; k <= F.depth(); ++k) {
    Op d = nc_mart_diff(f, F, k);
    acc += d.adjoint() * d;
  }
  return schatten_norm(psd_sqrt(acc), 1.0);
}

double col_h1_norm(const Op& f, const NCFiltration& F) {
  check_square(f, F.dim(), "operand");
  Op acc = Op::Zero(F.dim(), F.dim());
  for (int k = 1; k <= F.depth(); ++k) {
    Op d = nc_mart_diff(f, F, k);
    Op sq = d.adjoint() * d;
    acc += (k == 1) ? sq : F.apply(k - 1, sq);  // the first term stays unconditioned
  }
  return schatten_norm(psd_sqrt(acc), 1.0);
}

double col_BMO_norm(const Op& f, const NCFiltration& F) {
  check_square(f, F.dim(), "operand");
  double best = 0;
  for (int k = 1; k <= F.depth(); ++k) {
    Op c = f - F.apply(k - 1, f);
    best = std::max(best, schatten_norm(psd_sqrt(F.apply(k, c.adjoint() * c)), kInf));
  }
  return best;
}

double col_bmo_norm(const Op& f, const NCFiltration& F) {
  check_square(f, F.dim(), "operand");
  double best = 0;
  for (int k = 1; k <= F.depth(); ++k) {
    Op c = f - F.apply(k, f);
    best = std::max(best, schatten_norm(psd_sqrt(F.apply(k, c.adjoint() * c)), kInf));
  }
  return best;
}

Op spectral_proj_interval(const Op& x, double lo, double hi) {
  if (x.rows() != x.cols() || x.rows() == 0) throw std::invalid_argument("square matrix expected");
  if (!near(x, x.adjoint(), x.norm())) throw std::invalid_argument("not self-adjoint");
  Eigen::SelfAdjointEigenSolver<Op> es(x);
  Op out = Op::Zero(x.rows(), x.cols());
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()[i];
    if (lam > lo + 1e-12 && lam <= hi + 1e-12)
      out += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return out;
}

double NCBlock::cost() const {
  if (sigma1) return schatten_norm(sigma1_values, 1.0);
  double acc = 0;
  for (const auto& t : terms) acc += std::fabs(t.lambda);
  return acc;
}

Op nc_block_sum(const NCBlock& b, const NCFiltration& F) {
  if (b.sigma1) return b.sigma1_values;
  Op acc = Op::Zero(F.dim(), F.dim());
  for (const auto& t : b.terms) acc += t.lambda * t.a;
  return acc;
}

NCValidation validate_nc_block(const NCBlock& b, const NCFiltration& F, double tol) {
  auto fail = [](std::string d) { return NCValidation{false, std::move(d)}; };
  const int n = F.dim();
  if (b.sigma1) {
    check_square(b.sigma1_values, n, "values");
    if ((F.apply(1, b.sigma1_values) - b.sigma1_values).norm() >
        tol * std::max(1.0, b.sigma1_values.norm()))
      return fail("values not measurable at the first level");
    return {};
  }
  if (b.k < 1 || b.k > F.depth()) return fail("cancellation level out of range");
  Op sum = Op::Zero(n, n);
  for (size_t i = 0; i < b.terms.size(); ++i) {
    const auto& t = b.terms[i];
    std::string tag = "term " + std::to_string(i) + ": ";
    check_square(t.a, n, "values");
    check_square(t.q, n, "support");
    if (t.k_j < b.k || t.k_j > F.depth()) return fail(tag + "support level out of range");
    if ((t.q - t.q.adjoint()).norm() > tol || (t.q * t.q - t.q).norm() > tol)
      return fail(tag + "support is not a projection");
    if ((F.apply(t.k_j, t.q) - t.q).norm() > tol) return fail(tag + "support not at its level");
    double tq = nc_trace(t.q).real();
    if (tq <= tol) return fail(tag + "support has zero trace");
    if ((t.a * t.q - t.a).norm() > tol * std::max(1.0, t.a.norm()))
      return fail(tag + "values not supported by the projection");
    double bound = std::pow(tq, -one_over_conj(b.p)) / (t.k_j - b.k + 1);
    if (schatten_norm(t.a, b.p) > bound + tol * std::max(1.0, bound))
      return fail(tag + "norm bound fails");
    sum += t.lambda * t.a;
  }
  if (F.apply(b.k, sum).norm() > tol * std::max(1.0, sum.norm()))
    return fail("cancellation fails");
  return {};
}

NCBlock decompose_delta_projection(const Op& p, const NCFiltration& F, int k) {
  check_square(p, F.dim(), "projection");
  if ((p - p.adjoint()).norm() > kTol || (p * p - p).norm() > kTol)
    throw std::invalid_argument("not a projection");
  if (k < 2 || k > F.depth()) throw std::out_of_range("level out of range");

  NCBlock out;
  out.k = k - 1;
  out.p = 2.0;
  Op ek = F.apply(k, p);
  Op ekm = F.apply(k - 1, p);
  if ((ek - ekm).norm() <= 1e-12) return out;

  struct Fam {
    const Op* m;
    int level;
    double coeff;  // per-band weight numerator
    double sign;
  };
  for (const Fam& fam : {Fam{&ek, k, 2.0, 1.0}, Fam{&ekm, k - 1, 1.0, -1.0}}) {
    Eigen::SelfAdjointEigenSolver<Op> es(*fam.m);
    // bands (1/(j+1), 1/j] of the spectrum; eigenprojections stay inside
    // the level's algebra
    std::map<long long, Op> bands;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      double lam = es.eigenvalues()[i];
      if (lam <= 1e-12) continue;
      long long j = static_cast<long long>(std::floor(1.0 / lam + 1e-9));
      auto it = bands.find(j);
      Op vv = es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      if (it == bands.end())
        bands.emplace(j, std::move(vv));
      else
        it->second += vv;
    }
    for (auto& [j, q] : bands) {
      double tq = nc_trace(q).real();
      double lam = (fam.coeff / static_cast<double>(j)) * tq;
      NCTerm t;
      t.lambda = fam.sign * lam;
      t.a = (*fam.m * q) / lam;
      t.k_j = fam.level;
      t.q = q;
      out.terms.push_back(std::move(t));
    }
  }
  return out;
}

TruncationResult truncate_block(const NCBlock& b, const NCFiltration& F, int N) {
  if (N < 0) throw std::invalid_argument("length must be nonnegative");
  if (b.sigma1) throw std::invalid_argument("truncation applies to the cancellative kind");
  TruncationResult out;
  if (static_cast<int>(b.terms.size()) <= N) {
    out.block = b;
    return out;
  }
  const double k = static_cast<double>(b.k);
  out.block.k = 1;
  out.block.p = b.p;
  Op tail = Op::Zero(F.dim(), F.dim());
  for (size_t i = 0; i < b.terms.size(); ++i) {
    const auto& t = b.terms[i];
    if (static_cast<int>(i) < N) {
      // (k lambda, a/k) stays a valid subatom at cancellation level 1:
      // k (k_j - k + 1) >= k_j  whenever  k_j >= k >= 1
      NCTerm h;
      h.lambda = k * t.lambda;
      h.a = t.a / k;
      h.k_j = t.k_j;
      h.q = t.q;
      out.block.terms.push_back(std::move(h));
    } else {
      tail += t.lambda * t.a;
      out.tail_mass += std::fabs(t.lambda);
      out.distance_cert += std::fabs(t.lambda) * schatten_norm(t.a, 1.0);
    }
  }
  Op t1 = F.apply(1, tail);
  double lam = schatten_norm(t1, 1.0);
  out.distance_cert += lam;
  if (lam > 1e-14) {
    NCTerm tt;
    tt.lambda = lam;
    tt.a = t1 / lam;
    tt.k_j = 1;
    tt.q = Op::Identity(F.dim(), F.dim());
    out.block.terms.push_back(std::move(tt));
    // the collapsed tail saturates its p-bound only over a scalar first
    // level; reported, not asserted
    out.tail_bound_ok = schatten_norm(t1, b.p) <= lam * (1.0 + 1e-9);
  }
  return out;
}

std::complex<double> nc_pairing(const Op& f, const Op& phi) {
  if (f.rows() != phi.rows() || f.cols() != phi.cols() || f.rows() != f.cols())
    throw std::invalid_argument("shape mismatch");
  return nc_trace(f * phi.adjoint());
}

std::pair<double, double> nc_duality_bound_check_p2(const NCBlock& b, const Op& phi,
                                                    const NCFiltration& F) {
  check_square(phi, F.dim(), "operand");
  if (b.sigma1) {
    double lhs = std::abs(nc_pairing(b.sigma1_values, phi));
    double rhs = b.cost() * schatten_norm(F.apply(1, phi), kInf);
    return {lhs, rhs};
  }
  if (std::fabs(b.p - 2.0) > 1e-12)
    throw std::invalid_argument("bound is certified at exponent two");
  double lhs = std::abs(nc_pairing(nc_block_sum(b, F), phi));
  double sup = 0;
  for (int k = 1; k <= F.depth(); ++k)
    sup = std::max(sup, schatten_norm(nc_mart_diff(phi, F, k), kInf));
  double rhs = b.cost() * (col_bmo_norm(phi, F) + sup);
  return {lhs, rhs};
}

}  // namespace martblocks
