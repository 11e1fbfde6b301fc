#pragma once

// Dense double-precision kernels used by the trainers. Each kernel has a
// scalar reference in simd::scalar and vector variants selected once at
// runtime from the host CPU. TEXTDIAR_ISA=scalar|avx2|neon in the
// environment overrides the choice.
//
// Elementwise kernels (axpy, decay_step, scale) perform the same IEEE
// operations in the same order as the scalar reference and are bitwise
// identical to it. Reductions (dot, sum_squares) reassociate and agree
// with the reference to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace textdiar::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

// Variants compiled into this build and supported by the running CPU.
std::span<const Isa> available_isas();

Isa active_isa();

// Pins the dispatch target. Throws a config error if unavailable. Intended
// for tests and benchmarks; not thread-safe with concurrent kernel calls.
void set_active_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// w -= lr * (g + l2 * w)
void decay_step(std::span<double> w, std::span<const double> g, double lr,
                double l2);
// x *= a
void scale(double a, std::span<double> x);

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*decay_step)(double*, const double*, double, double, std::size_t);
  void (*scale)(double, double*, std::size_t);
};

// Kernel table for a specific variant (for equivalence testing).
const KernelTable& kernels_for(Isa isa);

namespace scalar {
extern const KernelTable kTable;
}
#if defined(TEXTDIAR_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif
#if defined(TEXTDIAR_HAVE_NEON)
namespace neon {
extern const KernelTable kTable;
}
#endif

}  // namespace textdiar::simd
