#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "martblocks/prob.hpp"

// Atoms, subatoms, atomic blocks: construction, validation, decomposition
// of H1 variables into blocks, and the exact gauge oracle on tiny spaces.
//
// Conventions. A block's cancellation level k means E_k(block) = 0. A
// subatom supported on a level-k_j set A_j (k_j >= k) must satisfy
//   ||a||_p <= mu(A_j)^e / (k_j - k + 1),  e = -1/p' by default.
// The damping factor uses the block's cancellation level, so a subatom
// sitting one level finer than the cancellation carries a factor 1/2.

namespace martblocks {

struct ValidationResult {
  bool ok = true;
  std::string diagnostic;  // names the first failed condition
};

// A p-atom: either the mean-normalized kind (sigma1 = true, level-1
// measurable, ||a||_1 = 1) or the cancellative kind (E_k a = 0, support in
// the level-k set A, ||a||_p <= mu(A)^{-1/p'}).
struct PAtom {
  bool sigma1 = false;
  int k = 0;
  std::vector<int> A;
  Rv values;
  double p = 2.0;
};

ValidationResult validate_atom(const PAtom& a, const Filtration& F, double tol = 1e-9);

// One term of an atomic block.
struct Subatom {
  int k_block = 0;      // cancellation level of the owning block
  int k_j = 0;          // support level, >= k_block
  std::vector<int> A;   // support set, level-k_j measurable
  Rv values;
  double norm_p = 2.0;      // exponent the bound is checked in
  double measure_exp = 0;   // e above; -1/p' for H1 blocks
};

// e = -1/p' for the given p.
Subatom make_subatom(int k_block, int k_j, std::vector<int> A, Rv values, double p);
// e = 1 - 1/p0 - 1/q' for the (p0, q) scale.
Subatom make_subatom_pq(int k_block, int k_j, std::vector<int> A, Rv values, double p0, double q);

ValidationResult validate_subatom(const Subatom& s, const Filtration& F, double tol = 1e-9);

// ||s||_1 <= 1/(k_j - k_block + 1) <= 1; the L1 leg of every cost chain.
bool subatom_l1_bound_check(const Subatom& s, const Filtration& F, double tol = 1e-9);

// An atomic block: the level-1 measurable kind (cost ||b||_1) or the
// cancellative kind b = sum_j lambda_j a_j with E_k b = 0 (cost sum |lambda|).
struct AtomicBlock {
  bool sigma1 = false;
  Rv sigma1_values;  // set when sigma1
  int k = 0;         // cancellation level when not sigma1
  std::vector<std::pair<double, Subatom>> terms;

  double cost() const;
};

// Pointwise sum sum_j lambda_j a_j (or the sigma1 values).
Rv block_sum(const AtomicBlock& b, const Filtration& F);

ValidationResult validate_block(const AtomicBlock& b, const Filtration& F, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Constructions.
// ---------------------------------------------------------------------------

// The two-level spectral decomposition of Delta_k(indicator of A0):
// group E_k chi and E_{k-1} chi by the bands (1/(j+1), 1/j], with
// coefficients (2/j) mu and (1/j) mu. Cancellation level k - 1; total cost
// <= 6 mu(A0). A0 is any nonempty point set; k >= 2. When Delta_k vanishes
// the block has no terms. Subatoms are tagged with exponent p (valid for
// every p; the bands bound the values directly).
AtomicBlock decompose_delta_indicator(const std::vector<int>& A0, const Filtration& F, int k,
                                      double p = 2.0);

// Threshold split: dh_k = df_k 1{|df_k| > 2 M_{k-1}} - E_{k-1}(same), with
// M_k the running pathwise max of |df_j|, j <= k. Level 1 is exempt (its
// difference stays in the first component). Returns (g, h) with f = g + h.
std::pair<Rv, Rv> davis_split(const Rv& f, const Filtration& F);

// Atomic decomposition of the conditioned-square-function space: dyadic
// stopping windows D_{m,j} = {2^m < s_(j) <= 2^{m+1}} (s_(j) the truncated
// conditioned square function, level-(j-1) measurable) cut the stopped
// differences df_j chi_D into (j-1, D)-atoms; the level-1 part becomes one
// mean-normalized atom. Exact reconstruction of E_K f; the coefficient sum
// is reported, not asserted, against h1_norm.
struct H1AtomList {
  std::vector<std::pair<double, PAtom>> atoms;
};
H1AtomList h1_atomic_decompose(const Rv& g, const Filtration& F, double p = 2.0);

struct DecompositionReport {
  std::vector<AtomicBlock> blocks;
  double cost = 0;
  Rv residual;  // target minus the block sum; ~0 by construction
};

// Full pipeline: threshold split, atoms from the quiet part, per-level
// indicator expansions from the loud part, residual to a finest-level
// block. Every emitted block validates at the requested p (2 or infinity
// are the tested choices).
DecompositionReport decompose_H1_to_blocks(const Rv& f, const Filtration& F, double p);

// Exact gauge of the atomic-block norm at p = infinity on spaces of at
// most 8 points: minimize ||g||_1 + sum |lambda| over representations
// f = g + sum_k b_k, g level-1 measurable, b_k spanned by the extreme
// infinity-subatoms for cancellation level k. Solved as a linear program.
// Only p = infinity is exact (finitely many extreme subatoms).
double atb_norm_lp(const Rv& f, const Filtration& F,
                   double p = std::numeric_limits<double>::infinity());

// integral of f*g; the duality pairing.
double pairing(const Rv& f, const Rv& g);

// (lhs, rhs) of |<b, phi>| <= cost(b) * (bmo_2(phi) + sup_k ||dphi_k||_inf)
// for cancellative blocks at p = 2; level-1 blocks pair against ||E_1
// phi||_inf instead. Holds with constant one; no further input.
std::pair<double, double> duality_bound_check_p2(const AtomicBlock& b, const Rv& phi,
                                                 const Filtration& F);

// Quasinorm upper bound from a concrete list of (p0, q) blocks: validates
// each block under the e = 1 - 1/p0 - 1/q' rule, checks the sum against
// the target, and returns (sum_i cost_i^{p0})^{1/p0} (level-1 blocks cost
// ||b||_{p0}). Throws std::invalid_argument when a certificate fails.
double hp_atb_quasinorm_upper(const Rv& f, const Filtration& F, double p0, double q,
                              const std::vector<AtomicBlock>& blocks);

}  // namespace martblocks
