#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <variant>
#include <vector>

// Finite-dimensional tracial matrix algebras: the normalized trace, two
// concrete kinds of conditional-expectation levels (pinching by a
// projection partition, partial trace over a tensor factor), column
// Hardy/BMO norms, spectral projections, the two-level decomposition of a
// projection's martingale difference, and block truncation.

namespace martblocks {

using Op = Eigen::MatrixXcd;

// Normalized trace tau(1) = 1.
std::complex<double> nc_trace(const Op& x);

struct TracialAlgebra {
  int n = 1;
  explicit TracialAlgebra(int n_);
  Op identity() const;
};

// One conditional-expectation level: x -> sum_i p_i x p_i.
struct PinchLevel {
  std::vector<Op> projections;  // orthogonal family summing to 1
};

// One conditional-expectation level on M_a (x) M_b: partial trace over the
// right factor, re-tensored with the normalized identity.
struct TensorLevel {
  int left_dim = 1;
  int right_dim = 1;
};

using NCLevel = std::variant<PinchLevel, TensorLevel>;

// Increasing chain of subalgebras, optionally conjugated by one global
// unitary frame. Construction validates each level's data, the conditional
// expectation axioms, and the nesting E_k E_{k+1} = E_k = E_{k+1} E_k on
// the matrix-unit basis.
class NCFiltration {
 public:
  NCFiltration(int n, std::vector<NCLevel> levels, std::optional<Op> frame = std::nullopt);

  int dim() const { return n_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  const NCLevel& level(int k) const;  // k in [1, depth]

  // E_k(x); k = 0 returns the zero matrix (the BMO convention).
  Op apply(int k, const Op& x) const;

 private:
  Op apply_raw(int k, const Op& x) const;  // without the frame

  int n_;
  std::vector<NCLevel> levels_;
  std::optional<Op> frame_;
};

Op nc_cond_exp(const Op& x, const NCFiltration& F, int k);
Op nc_mart_diff(const Op& x, const NCFiltration& F, int k);  // df_1 = E_1 x

// Normalized Schatten norm: tau(|x|^p)^{1/p}; p = infinity is the operator
// norm. p in [1, inf].
double schatten_norm(const Op& x, double p);

// ||(sum_k df_k^* df_k)^{1/2}||_1
double col_H1_norm(const Op& f, const NCFiltration& F);
// ||(df_1^* df_1 + sum_{k>=2} E_{k-1}(df_k^* df_k))^{1/2}||_1
double col_h1_norm(const Op& f, const NCFiltration& F);
// sup_k ||(E_k |f - E_{k-1} f|^2)^{1/2}||_inf with E_0 = 0
double col_BMO_norm(const Op& f, const NCFiltration& F);
// E_k-centered variant
double col_bmo_norm(const Op& f, const NCFiltration& F);

// Sum of eigenprojections of a self-adjoint x with eigenvalue in (lo, hi].
Op spectral_proj_interval(const Op& x, double lo, double hi);

// One term lambda * a of a column block, supported by the projection q at
// level k_j (a q = a).
struct NCTerm {
  double lambda = 0;
  Op a;
  int k_j = 0;
  Op q;
};

struct NCBlock {
  bool sigma1 = false;
  Op sigma1_values;
  int k = 0;
  std::vector<NCTerm> terms;
  double p = 2.0;  // exponent the subatom bounds are certified in

  double cost() const;  // sum |lambda_j|, or ||b||_1 for the sigma1 kind
};

Op nc_block_sum(const NCBlock& b, const NCFiltration& F);

struct NCValidation {
  bool ok = true;
  std::string diagnostic;
};

NCValidation validate_nc_block(const NCBlock& b, const NCFiltration& F, double tol = 1e-10);

// Two-level spectral decomposition of Delta_k(p) = E_k p - E_{k-1} p for a
// projection p: band the spectra of E_k p and E_{k-1} p over (1/(j+1), 1/j],
// coefficients (2/j) tau(q) and -(1/j) tau(q). Valid at cancellation level
// k-1 with cost <= 6 tau(p); the level-k subatoms carry the damping 1/2.
NCBlock decompose_delta_projection(const Op& p, const NCFiltration& F, int k);

// Head-preserving truncation: the first N terms are rescaled to cancellation
// level 1 as (k lambda_j, a_j / k); the tail collapses to its E_1 projection
// as a single (1, identity-support) term. The tail term's p-norm bound only
// follows when level 1 is scalar, so it is reported as a flag, not asserted.
struct TruncationResult {
  NCBlock block;
  double distance_cert = 0;  // certified bound on ||b - b'||_1, <= 2k * tail mass
  double tail_mass = 0;      // sum of |lambda_j| over dropped terms
  bool tail_bound_ok = true;
};

TruncationResult truncate_block(const NCBlock& b, const NCFiltration& F, int N);

// tau(f phi^*)
std::complex<double> nc_pairing(const Op& f, const Op& phi);

// (lhs, rhs) of |tau(b phi^*)| <= cost(b) * (col_bmo(phi) + sup_k ||dphi_k||_inf)
// for cancellative blocks certified at p = 2; the sigma1 kind pairs against
// ||E_1 phi||_inf. Throws for blocks certified at any other exponent.
std::pair<double, double> nc_duality_bound_check_p2(const NCBlock& b, const Op& phi,
                                                    const NCFiltration& F);

}  // namespace martblocks
