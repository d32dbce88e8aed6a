#include "martblocks/kernels.hpp"

#include <cmath>

// Reference lane. The stride-4 accumulator layout mirrors one AVX2 register
// of doubles; keep the combine order ((s0+s2)+(s1+s3)) in sync with the
// AVX2 lane or the bit-equality tests will fail.

namespace martblocks::kernels {
namespace {

inline double combine(double s0, double s1, double s2, double s3) {
  return (s0 + s2) + (s1 + s3);
}

double s_wdot(const double* w, const double* v, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += w[i] * v[i];
    s1 += w[i + 1] * v[i + 1];
    s2 += w[i + 2] * v[i + 2];
    s3 += w[i + 3] * v[i + 3];
  }
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * v[i];
  return combine(s0, s1, s2, s3) + tail;
}

double s_wdot3(const double* w, const double* f, const double* g, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += w[i] * f[i] * g[i];
    s1 += w[i + 1] * f[i + 1] * g[i + 1];
    s2 += w[i + 2] * f[i + 2] * g[i + 2];
    s3 += w[i + 3] * f[i + 3] * g[i + 3];
  }
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * f[i] * g[i];
  return combine(s0, s1, s2, s3) + tail;
}

double s_wabs(const double* w, const double* v, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += w[i] * std::fabs(v[i]);
    s1 += w[i + 1] * std::fabs(v[i + 1]);
    s2 += w[i + 2] * std::fabs(v[i + 2]);
    s3 += w[i + 3] * std::fabs(v[i + 3]);
  }
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * std::fabs(v[i]);
  return combine(s0, s1, s2, s3) + tail;
}

double s_wsq(const double* w, const double* v, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += w[i] * (v[i] * v[i]);
    s1 += w[i + 1] * (v[i + 1] * v[i + 1]);
    s2 += w[i + 2] * (v[i + 2] * v[i + 2]);
    s3 += w[i + 3] * (v[i + 3] * v[i + 3]);
  }
  double tail = 0;
  for (; i < n; ++i) tail += w[i] * (v[i] * v[i]);
  return combine(s0, s1, s2, s3) + tail;
}

void s_sq_acc(double* acc, const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += v[i] * v[i];
}

void s_axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double s_maxabs(const double* v, std::size_t n) {
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::fabs(v[i]);
    if (a > m) m = a;
  }
  return m;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{s_wdot, s_wdot3, s_wabs, s_wsq, s_sq_acc, s_axpy, s_maxabs, "scalar"};
  return ops;
}

}  // namespace martblocks::kernels
