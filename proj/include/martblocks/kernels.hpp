#pragma once

#include <cstddef>
#include <string>

// Flat floating-point kernels used by the norm and decomposition loops.
// Two lanes: a scalar reference and an AVX2 variant picked at runtime.
// Both lanes accumulate in 4 stride-4 partial sums and combine them the
// same way, with fp contraction disabled, so results are bit-identical.

namespace martblocks::kernels {

struct Ops {
  // sum_i w[i]*v[i]
  double (*wdot)(const double* w, const double* v, std::size_t n);
  // sum_i w[i]*f[i]*g[i]
  double (*wdot3)(const double* w, const double* f, const double* g, std::size_t n);
  // sum_i w[i]*|v[i]|
  double (*wabs)(const double* w, const double* v, std::size_t n);
  // sum_i w[i]*v[i]*v[i]
  double (*wsq)(const double* w, const double* v, std::size_t n);
  // acc[i] += v[i]*v[i]
  void (*sq_acc)(double* acc, const double* v, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  // max_i |v[i]|, 0 for n == 0
  double (*maxabs)(const double* v, std::size_t n);
  const char* name;
};

const Ops& scalar_ops();

#if defined(MARTBLOCKS_HAVE_AVX2)
const Ops& avx2_ops();
#endif

// Active lane. Chosen once: AVX2 when the CPU supports it, else scalar.
// MARTBLOCKS_SIMD=scalar|avx2 overrides (unknown/unavailable values fall
// back to scalar).
const Ops& active();

inline double wdot(const double* w, const double* v, std::size_t n) { return active().wdot(w, v, n); }
inline double wdot3(const double* w, const double* f, const double* g, std::size_t n) { return active().wdot3(w, f, g, n); }
inline double wabs(const double* w, const double* v, std::size_t n) { return active().wabs(w, v, n); }
inline double wsq(const double* w, const double* v, std::size_t n) { return active().wsq(w, v, n); }
inline void sq_acc(double* acc, const double* v, std::size_t n) { active().sq_acc(acc, v, n); }
inline void axpy(double* y, double a, const double* x, std::size_t n) { active().axpy(y, a, x, n); }
inline double maxabs(const double* v, std::size_t n) { return active().maxabs(v, n); }

}  // namespace martblocks::kernels
