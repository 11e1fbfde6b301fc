#include <arm_neon.h>

#include "textdiar/simd/kernels.h"

namespace textdiar::simd::neon {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vaddq_f64(a0, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    a1 = vaddq_f64(a1, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double acc = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_squares(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t v0 = vld1q_f64(x + i);
    float64x2_t v1 = vld1q_f64(x + i + 2);
    a0 = vaddq_f64(a0, vmulq_f64(v0, v0));
    a1 = vaddq_f64(a1, vmulq_f64(v1, v1));
  }
  double acc = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

// vmulq/vaddq rather than vfmaq so results match the scalar reference.
void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void decay_step(double* w, const double* g, double lr, double l2,
                std::size_t n) {
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t vl2 = vdupq_n_f64(l2);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vw = vld1q_f64(w + i);
    float64x2_t t = vaddq_f64(vld1q_f64(g + i), vmulq_f64(vl2, vw));
    vst1q_f64(w + i, vsubq_f64(vw, vmulq_f64(vlr, t)));
  }
  for (; i < n; ++i) w[i] = w[i] - lr * (g[i] + l2 * w[i]);
}

void scale(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] = a * x[i];
}

}  // namespace

const KernelTable kTable = {dot, sum_squares, axpy, decay_step, scale};

}  // namespace textdiar::simd::neon
