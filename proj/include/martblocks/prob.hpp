#pragma once

#include <memory>
#include <string>
#include <vector>

// Finite filtered probability spaces and real random variables on them.
//
// A space is a finite set of points with strictly positive weights summing
// to one. A filtration is a refining chain of partitions; levels are
// 1-based, level k+1 refines level k, and conditional expectation at level
// 0 is identically zero by convention. Martingale differences start with
// df_1 = E_1(f).

namespace martblocks {

class WeightedSpace {
 public:
  // Normalizes the weights to total mass one. Throws std::invalid_argument
  // on an empty list, a nonpositive weight, or a total farther than 1e-12
  // from 1 before normalization is possible (zero/negative total).
  explicit WeightedSpace(std::vector<double> weights);

  int size() const { return static_cast<int>(weights_.size()); }
  double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& weights() const { return weights_; }

  double measure(const std::vector<int>& points) const;

 private:
  std::vector<double> weights_;
};

using SpacePtr = std::shared_ptr<const WeightedSpace>;

// A real random variable: values per point of one space.
struct Rv {
  SpacePtr space;
  std::vector<double> values;

  Rv() = default;
  Rv(SpacePtr s, std::vector<double> v);

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
};

Rv zero_rv(const SpacePtr& s);

// ---------------------------------------------------------------------------
// Filtration: refining chain of partitions over one space.
// ---------------------------------------------------------------------------

class Filtration {
 public:
  // levels[k-1][i] is the 0-based block id of point i at level k.
  // Validates: at least one level, ids contiguous from 0 with every block
  // nonempty, and each level refined by the next (points sharing a block at
  // level k+1 share one at level k). Throws std::invalid_argument.
  Filtration(SpacePtr space, std::vector<std::vector<int>> levels);

  const SpacePtr& space() const { return space_; }
  int points() const { return space_->size(); }
  int depth() const { return static_cast<int>(levels_.size()); }  // K

  // k in [1, depth()]; throws std::out_of_range otherwise.
  int block_count(int k) const;
  int block_of(int k, int point) const;
  const std::vector<int>& block_points(int k, int block) const;
  double block_measure(int k, int block) const;
  const std::vector<int>& level_ids(int k) const;

  // True when `points` is a union of level-k blocks.
  bool is_level_set(int k, const std::vector<int>& points) const;

  // Smallest level at which `points` is a union of blocks; 0 if none.
  int min_measurable_level(const std::vector<int>& points) const;

 private:
  void check_level_range(int k) const;

  SpacePtr space_;
  std::vector<std::vector<int>> levels_;               // per level: block id per point
  std::vector<std::vector<std::vector<int>>> blocks_;  // per level: per block: point list
  std::vector<std::vector<double>> block_measures_;
};

using FiltrationPtr = std::shared_ptr<const Filtration>;

// ---------------------------------------------------------------------------
// Conditional expectation and martingale structure.
// ---------------------------------------------------------------------------

// E_k(f): block averages at level k. k in [1, depth]; k = 0 returns the
// zero variable (the convention used throughout).
Rv cond_exp(const Rv& f, const Filtration& F, int k);

// df_k = E_k f - E_{k-1} f, so df_1 = E_1 f.
Rv mart_diff(const Rv& f, const Filtration& F, int k);

// S(f) = (sum_k |df_k|^2)^(1/2), pointwise.
Rv square_function(const Rv& f, const Filtration& F);

// s(f) = (|f_1|^2 + sum_{k>=2} E_{k-1}|df_k|^2)^(1/2), pointwise; the k = 1
// term is |E_1 f|^2.
Rv cond_square_function(const Rv& f, const Filtration& F);

// Precomputed martingale data for one variable.
class MartingaleView {
 public:
  MartingaleView(Rv f, FiltrationPtr F);

  const Rv& f() const { return f_; }
  const Filtration& filtration() const { return *F_; }
  const Rv& diff(int k) const;                  // df_k, k in [1, depth]
  const std::vector<Rv>& diffs() const { return diffs_; }

 private:
  Rv f_;
  FiltrationPtr F_;
  std::vector<Rv> diffs_;
};

// ---------------------------------------------------------------------------
// Elementary integrals and norms shared by all modules.
// ---------------------------------------------------------------------------

double integral(const Rv& f);                  // sum_i w_i f_i
double inner(const Rv& f, const Rv& g);        // sum_i w_i f_i g_i
double lp_norm(const Rv& f, double p);         // weighted; p >= 1 or infinity
double linf_norm(const Rv& f);

// Pointwise helpers; operands must share a space (size-checked).
Rv rv_add(const Rv& a, const Rv& b);
Rv rv_sub(const Rv& a, const Rv& b);
Rv rv_scale(const Rv& a, double c);

bool same_space(const Rv& a, const Rv& b);

}  // namespace martblocks
