#include "martblocks/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "martblocks/kernels.hpp"

namespace martblocks {

WeightedSpace::WeightedSpace(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("WeightedSpace: no points");
  double total = 0;
  for (double w : weights_) {
    if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("WeightedSpace: weights must be positive and finite");
    total += w;
  }
  for (double& w : weights_) w /= total;
}

double WeightedSpace::measure(const std::vector<int>& points) const {
  double m = 0;
  for (int i : points) {
    if (i < 0 || i >= size()) throw std::out_of_range("WeightedSpace::measure: point out of range");
    m += weights_[static_cast<std::size_t>(i)];
  }
  return m;
}

Rv::Rv(SpacePtr s, std::vector<double> v) : space(std::move(s)), values(std::move(v)) {
  if (!space) throw std::invalid_argument("Rv: null space");
  if (static_cast<int>(values.size()) != space->size())
    throw std::invalid_argument("Rv: value count does not match the space");
}

Rv zero_rv(const SpacePtr& s) { return Rv(s, std::vector<double>(static_cast<std::size_t>(s->size()), 0.0)); }

bool same_space(const Rv& a, const Rv& b) {
  if (a.space == b.space) return true;
  return a.space && b.space && a.space->weights() == b.space->weights();
}

// ---------------------------------------------------------------------------

Filtration::Filtration(SpacePtr space, std::vector<std::vector<int>> levels)
    : space_(std::move(space)), levels_(std::move(levels)) {
  if (!space_) throw std::invalid_argument("Filtration: null space");
  if (levels_.empty()) throw std::invalid_argument("Filtration: at least one level required");
  const int n = space_->size();
  blocks_.resize(levels_.size());
  block_measures_.resize(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const auto& ids = levels_[k];
    if (static_cast<int>(ids.size()) != n)
      throw std::invalid_argument("Filtration: level size does not match the space");
    int maxid = -1;
    for (int id : ids) {
      if (id < 0) throw std::invalid_argument("Filtration: negative block id");
      maxid = std::max(maxid, id);
    }
    blocks_[k].assign(static_cast<std::size_t>(maxid + 1), {});
    for (int i = 0; i < n; ++i) blocks_[k][static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])].push_back(i);
    for (const auto& b : blocks_[k])
      if (b.empty()) throw std::invalid_argument("Filtration: empty block id (ids must be contiguous)");
    block_measures_[k].reserve(blocks_[k].size());
    for (const auto& b : blocks_[k]) block_measures_[k].push_back(space_->measure(b));
    if (k > 0) {
      // refinement: a block at this level may not straddle two coarser blocks
      for (const auto& b : blocks_[k]) {
        int coarse = levels_[k - 1][static_cast<std::size_t>(b.front())];
        for (int i : b)
          if (levels_[k - 1][static_cast<std::size_t>(i)] != coarse)
            throw std::invalid_argument("Filtration: level does not refine the previous one");
      }
    }
  }
}

void Filtration::check_level_range(int k) const {
  if (k < 1 || k > depth()) throw std::out_of_range("Filtration: level out of range");
}

int Filtration::block_count(int k) const {
  check_level_range(k);
  return static_cast<int>(blocks_[static_cast<std::size_t>(k - 1)].size());
}

int Filtration::block_of(int k, int point) const {
  check_level_range(k);
  if (point < 0 || point >= points()) throw std::out_of_range("Filtration: point out of range");
  return levels_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(point)];
}

const std::vector<int>& Filtration::block_points(int k, int block) const {
  check_level_range(k);
  const auto& bl = blocks_[static_cast<std::size_t>(k - 1)];
  if (block < 0 || block >= static_cast<int>(bl.size())) throw std::out_of_range("Filtration: block out of range");
  return bl[static_cast<std::size_t>(block)];
}

double Filtration::block_measure(int k, int block) const {
  check_level_range(k);
  const auto& bm = block_measures_[static_cast<std::size_t>(k - 1)];
  if (block < 0 || block >= static_cast<int>(bm.size())) throw std::out_of_range("Filtration: block out of range");
  return bm[static_cast<std::size_t>(block)];
}

const std::vector<int>& Filtration::level_ids(int k) const {
  check_level_range(k);
  return levels_[static_cast<std::size_t>(k - 1)];
}

bool Filtration::is_level_set(int k, const std::vector<int>& pts) const {
  check_level_range(k);
  std::vector<char> in(static_cast<std::size_t>(points()), 0);
  for (int i : pts) {
    if (i < 0 || i >= points()) throw std::out_of_range("Filtration: point out of range");
    in[static_cast<std::size_t>(i)] = 1;
  }
  // every touched block must be fully inside
  for (int i : pts)
    for (int j : block_points(k, block_of(k, i)))
      if (!in[static_cast<std::size_t>(j)]) return false;
  return true;
}

int Filtration::min_measurable_level(const std::vector<int>& pts) const {
  for (int k = 1; k <= depth(); ++k)
    if (is_level_set(k, pts)) return k;
  return 0;
}

// ---------------------------------------------------------------------------

Rv cond_exp(const Rv& f, const Filtration& F, int k) {
  if (!f.space || f.size() != F.points() ||
      (f.space != F.space() && f.space->weights() != F.space()->weights()))
    throw std::invalid_argument("cond_exp: variable not on the filtration's space");
  if (k == 0) return zero_rv(f.space);
  if (k < 0 || k > F.depth()) throw std::out_of_range("cond_exp: level out of range");
  Rv out = zero_rv(f.space);
  const int B = F.block_count(k);
  for (int b = 0; b < B; ++b) {
    const auto& pts = F.block_points(k, b);
    double s = 0;
    for (int i : pts) s += f.space->weight(i) * f.values[static_cast<std::size_t>(i)];
    double avg = s / F.block_measure(k, b);
    for (int i : pts) out.values[static_cast<std::size_t>(i)] = avg;
  }
  return out;
}

Rv mart_diff(const Rv& f, const Filtration& F, int k) {
  if (k < 1 || k > F.depth()) throw std::out_of_range("mart_diff: level out of range");
  Rv hi = cond_exp(f, F, k);
  if (k == 1) return hi;
  Rv lo = cond_exp(f, F, k - 1);
  return rv_sub(hi, lo);
}

Rv square_function(const Rv& f, const Filtration& F) {
  Rv acc = zero_rv(f.space);
  for (int k = 1; k <= F.depth(); ++k) {
    Rv d = mart_diff(f, F, k);
    kernels::sq_acc(acc.values.data(), d.values.data(), d.values.size());
  }
  for (double& x : acc.values) x = std::sqrt(x);
  return acc;
}

Rv cond_square_function(const Rv& f, const Filtration& F) {
  Rv acc = zero_rv(f.space);
  Rv f1 = cond_exp(f, F, 1);
  kernels::sq_acc(acc.values.data(), f1.values.data(), f1.values.size());
  for (int k = 2; k <= F.depth(); ++k) {
    Rv d = mart_diff(f, F, k);
    for (double& x : d.values) x = x * x;
    Rv c = cond_exp(d, F, k - 1);
    for (int i = 0; i < acc.size(); ++i) acc.values[static_cast<std::size_t>(i)] += c.values[static_cast<std::size_t>(i)];
  }
  for (double& x : acc.values) x = std::sqrt(x);
  return acc;
}

MartingaleView::MartingaleView(Rv f, FiltrationPtr F) : f_(std::move(f)), F_(std::move(F)) {
  if (!F_) throw std::invalid_argument("MartingaleView: null filtration");
  diffs_.reserve(static_cast<std::size_t>(F_->depth()));
  for (int k = 1; k <= F_->depth(); ++k) diffs_.push_back(mart_diff(f_, *F_, k));
  // telescoping: the differences must sum to E_K f
  Rv sum = zero_rv(f_.space);
  for (const auto& d : diffs_)
    kernels::axpy(sum.values.data(), 1.0, d.values.data(), d.values.size());
  Rv ek = cond_exp(f_, *F_, F_->depth());
  Rv gap = rv_sub(sum, ek);
  if (kernels::maxabs(gap.values.data(), gap.values.size()) > 1e-10)
    throw std::logic_error("MartingaleView: differences fail to telescope");
}

const Rv& MartingaleView::diff(int k) const {
  if (k < 1 || k > static_cast<int>(diffs_.size())) throw std::out_of_range("MartingaleView::diff: level out of range");
  return diffs_[static_cast<std::size_t>(k - 1)];
}

// ---------------------------------------------------------------------------

double integral(const Rv& f) {
  const auto& w = f.space->weights();
  return kernels::wdot(w.data(), f.values.data(), f.values.size());
}

double inner(const Rv& f, const Rv& g) {
  if (!same_space(f, g)) throw std::invalid_argument("inner: operands on different spaces");
  return kernels::wdot3(f.space->weights().data(), f.values.data(), g.values.data(), f.values.size());
}

double lp_norm(const Rv& f, double p) {
  if (std::isinf(p)) return linf_norm(f);
  if (!(p >= 1)) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
  const auto& w = f.space->weights();
  if (p == 1.0) return kernels::wabs(w.data(), f.values.data(), f.values.size());
  if (p == 2.0) return std::sqrt(kernels::wsq(w.data(), f.values.data(), f.values.size()));
  double s = 0;
  for (int i = 0; i < f.size(); ++i)
    s += w[static_cast<std::size_t>(i)] * std::pow(std::fabs(f[i]), p);
  return std::pow(s, 1.0 / p);
}

double linf_norm(const Rv& f) { return kernels::maxabs(f.values.data(), f.values.size()); }

Rv rv_add(const Rv& a, const Rv& b) {
  if (!same_space(a, b)) throw std::invalid_argument("rv_add: operands on different spaces");
  Rv out = a;
  kernels::axpy(out.values.data(), 1.0, b.values.data(), b.values.size());
  return out;
}

Rv rv_sub(const Rv& a, const Rv& b) {
  if (!same_space(a, b)) throw std::invalid_argument("rv_sub: operands on different spaces");
  Rv out = a;
  kernels::axpy(out.values.data(), -1.0, b.values.data(), b.values.size());
  return out;
}

Rv rv_scale(const Rv& a, double c) {
  Rv out = a;
  for (double& x : out.values) x *= c;
  return out;
}

}  // namespace martblocks
