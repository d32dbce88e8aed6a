#pragma once

#include <utility>

#include "martblocks/prob.hpp"

// Martingale Hardy and BMO norms, the Lipschitz-type scale, and the
// quasinorm built from validated block decompositions.

namespace martblocks {

// Conjugate exponent; p in (1, inf], conj(inf) = 1.
double conjugate_exponent(double p);

// Holder pair with validation: p in (1, inf], pprime = p/(p-1) within 1e-12.
struct NormParams {
  double p;
  double pprime;
  NormParams(double p_, double pprime_);
};

// ||s(f)||_1, conditioned square function.
double h1_norm(const Rv& f, const Filtration& F);

// ||S(f)||_1, square function.
double H1_norm(const Rv& f, const Filtration& F);

// sup_k || (E_k |f - E_k f|^moment)^{1/moment} ||_inf, moment >= 1.
double bmo_norm(const Rv& f, const Filtration& F, double moment);

// sup_k || (E_k |f - E_{k-1} f|^2)^{1/2} ||_inf with E_0 = 0.
double BMO_norm(const Rv& f, const Filtration& F);

// (BMO_norm, bmo_norm(2) + sup_k ||df_k||_inf). First <= second always;
// second <= 3 * first always (triangle + conditional Jensen, no other input).
std::pair<double, double> bmo_equiv_gap(const Rv& f, const Filtration& F);

// sum_k ||df_k||_1.
double diag_norm(const Rv& f, const Filtration& F);

// sup over levels k and level-k blocks A of
//   mu(A)^{1 - 1/p0} [ (avg_A |f - E_k f|^q)^{1/q} + ||df_k||_inf ],
// p0 in (0, 1), q in [1, inf). The sup ranges over single blocks; see
// lambda_pq_norm_ext for the union-extended scan.
double lambda_pq_norm(const Rv& f, const Filtration& F, double p0, double q);

// Same quantity with the scan extended to unions of at most two blocks of
// one level. Kept separate to document how far the block-only sup falls
// short (it does not, on all tested instances: a union's average is a
// convex combination of block averages while its measure is larger).
double lambda_pq_norm_ext(const Rv& f, const Filtration& F, double p0, double q);

}  // namespace martblocks
