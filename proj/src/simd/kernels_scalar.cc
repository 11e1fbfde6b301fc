#include "textdiar/simd/kernels.h"

namespace textdiar::simd::scalar {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_squares(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void decay_step(double* w, const double* g, double lr, double l2,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] = w[i] - lr * (g[i] + l2 * w[i]);
}

void scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = a * x[i];
}

}  // namespace

const KernelTable kTable = {dot, sum_squares, axpy, decay_step, scale};

}  // namespace textdiar::simd::scalar
