#pragma once

#include <utility>
#include <vector>

#include "martblocks/atoms.hpp"
#include "martblocks/prob.hpp"

// Conditional medians, the median-anchored BMO functional, the four block
// constructions built from medians, and weak atoms with their two-piece
// split.

namespace martblocks {

// Per level-k block, the lowest attained value v with
//   mu(A n {f < v}) <= mu(A)/2  and  mu(A n {f > v}) <= mu(A)/2.
// The lowest valid real is always attained, so scanning attained values is
// exhaustive. Output is constant on level-k blocks.
Rv cond_median(const Rv& f, const Filtration& F, int k);

// Every attained value on the given level-k block satisfying both median
// inequalities, ascending. Medians are non-unique; this is the whole set.
std::vector<double> cond_median_all(const Rv& f, const Filtration& F, int k, int block);

// alpha_1 f .. alpha_K f, cached.
struct MedianSequence {
  Rv f;
  FiltrationPtr F;
  std::vector<Rv> alphas;

  MedianSequence(Rv f_, FiltrationPtr F_);
  const Rv& alpha(int k) const;  // k in [1, depth]
};

// lhs = E_k(chi_{A n {f <= alpha_k f}}); ok iff lhs >= 1/2 on A (up to tol).
// A must be measurable at level k. Exact consequence of the median bound on
// the strictly-greater set.
std::pair<Rv, bool> cm_lemma_check(const Rv& f, const Filtration& F, int k,
                                   const std::vector<int>& A, double tol = 1e-12);

// max of ||E_1 f||_inf, sup_k ||E_k|f - alpha_k f|^{p'}||_inf^{1/p'}, and
// sup_{k>=2} ||alpha_k f - alpha_{k-1} f||_inf.
double bmo_alpha_norm(const Rv& f, const Filtration& F, const MedianSequence& ms, double pprime);

// A block construction plus its documented cost certificate. b1/b2 expose
// the two raw pieces where the construction has them (sign: the sign
// pattern and the tie compensator; power: the half-moment and its
// compensator; mediandiff/indicator: the raw function and its projection).
struct MedianBlock {
  AtomicBlock block;
  double cost_certificate = 0;
  Rv b1, b2;
};

// The p'-moment construction on a level-k set A: the side of A carrying the
// larger half of int_A |f - alpha_k f|^{p'} keeps |f-alpha|^{p'-1}, the
// other side takes the compensating multiple of its indicator. Guarantees
// E_k(b) = 0 and pairing(f, b) >= (1/2) int_A |f - alpha_k f|^{p'}.
// Certificate: (1 + 2^{1/p'}) mu(A)^{1/p'} (side integral)^{1/p}.
MedianBlock build_block_power(const std::vector<int>& A, const Rv& f, const Filtration& F, int k,
                              double pprime);

// The signed p'-moment against the coarser median: g0 = sign(f - alpha_{k-1}f)
// |f - alpha_{k-1}f|^{p'-1} chi_A, b = g0 - E_{k-1}(g0), the projection part
// sliced over dyadic level sets of E_{k-1}(|f - alpha_{k-1}f|^{p'-1} chi_A).
// Cancellation level k-1. Certificate: 4 mu(A)^{1/p'} ||g0||_p, covering the
// damped g0 subatom (factor 2) plus the slice mass (factor 2).
MedianBlock build_block_mediandiff(const std::vector<int>& A, const Rv& f, const Filtration& F,
                                   int k, double pprime);

// The sign pattern b1 = chi_{A n {f>alpha}} - chi_{A n {f<alpha}} with tie
// compensator b2 = chi_{ties} E_k(b1)/E_k(chi_{ties}) (0*inf = 0 off the tie
// set). E_k(b1 - b2) = 0 exactly: on tie-free blocks the median forces both
// strict sides to measure mu/2. pairing(f, b) = int_A |f - alpha_k f| and
// ||b2||_inf <= 4. Certificate: 5 mu(A).
MedianBlock build_block_sign(const std::vector<int>& A, const Rv& f, const Filtration& F, int k);

// b = chi_A - E_{k-1}(chi_A), the projection sliced over the N-grid level
// sets of E_{k-1}(chi_A). Cancellation level k-1 (the chi_A subatom carries
// damping 1/2). Certificate follows the slice display
//   mu(A) + sum_j ||E_{k-1}(chi_A) chi_{B_j}||_inf mu(B_j),
// which is exactly 2 mu(A) when A is a single block and at most
// 2 mu(A) + mu(supp)/N in general. Vanishing difference gives the empty
// block with certificate 0.
MedianBlock build_block_indicator(const std::vector<int>& A, const Filtration& F, int k, int N);

// w = (phi - E_{k-1} phi) / mu(supp phi) for level-k measurable phi with
// ||phi||_inf <= 1.
struct WeakAtom {
  int k = 0;
  Rv phi;
  std::vector<int> A;
  Rv w;
};

WeakAtom weak_atom(const Rv& phi, const Filtration& F, int k);

// Two-piece split of w(xi) = [E_k(chi_A xi) - E_{k-1}(chi_A xi)]/mu(A) for a
// single level-k block A inside its level-(k-1) parent B:
//   a1 = -mu(A)^{-1} (avg_B chi_A xi) chi_{B\A},   a2 = w(xi) - a1 on A.
// Pointwise: |a1| <= 1/mu(B\A), |a2| <= 2/mu(A). The assembled block at
// cancellation level k-1 (both pieces sit one level finer, damping 1/2)
// certifies cost 2 mu(B\A) ||a1||_inf + 2 mu(A) ||a2||_inf <= 6.
struct WeakAtomSplit {
  Rv a1, a2;
  double certificate = 0;
  AtomicBlock block;
};

WeakAtomSplit weak_atom_split(const Rv& xi, const std::vector<int>& A, const Filtration& F, int k);

}  // namespace martblocks
