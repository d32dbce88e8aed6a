#include "martblocks/kernels.hpp"

#if defined(MARTBLOCKS_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

// AVX2 lane. No FMA: mul+add keeps every intermediate rounded exactly like
// the scalar reference, so the two lanes agree bit for bit.

namespace martblocks::kernels {
namespace {

inline double hsum(__m256d acc) {
  // lanes: (s0+s2) + (s1+s3), matching the scalar combine order
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d sum = _mm_add_pd(lo, hi);                      // (s0+s2, s1+s3)
  return _mm_cvtsd_f64(_mm_add_sd(sum, _mm_unpackhi_pd(sum, sum)));
}

inline __m256d absmask() { return _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL)); }

double v_wdot(const double* w, const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(v + i)));
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * v[i];
  return hsum(acc) + tail;
}

double v_wdot3(const double* w, const double* f, const double* g, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(p, _mm256_loadu_pd(g + i)));
  }
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * f[i] * g[i];
  return hsum(acc) + tail;
}

double v_wabs(const double* w, const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_and_pd(_mm256_loadu_pd(v + i), absmask());
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), a));
  }
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * std::fabs(v[i]);
  return hsum(acc) + tail;
}

double v_wsq(const double* w, const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(v + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(x, x)));
  }
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * (v[i] * v[i]);
  return hsum(acc) + tail;
}

void v_sq_acc(double* acc, const double* v, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(v + i);
    __m256d a = _mm256_loadu_pd(acc + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(a, _mm256_mul_pd(x, x)));
  }
  for (; i < n; ++i) acc[i] += v[i] * v[i];
}

void v_axpy(double* y, double a, const double* x, std::size_t n) {
  __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yi, _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double v_maxabs(const double* v, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, _mm256_and_pd(_mm256_loadu_pd(v + i), absmask()));
  __m128d lo = _mm256_castpd256_pd128(m);
  __m128d hi = _mm256_extractf128_pd(m, 1);
  __m128d mx = _mm_max_pd(lo, hi);
  double out = _mm_cvtsd_f64(_mm_max_sd(mx, _mm_unpackhi_pd(mx, mx)));
  for (; i < n; ++i) {
    double a = std::fabs(v[i]);
    if (a > out) out = a;
  }
  return out;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{v_wdot, v_wdot3, v_wabs, v_wsq, v_sq_acc, v_axpy, v_maxabs, "avx2"};
  return ops;
}

}  // namespace martblocks::kernels

#endif  // MARTBLOCKS_HAVE_AVX2
