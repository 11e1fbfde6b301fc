#include <atomic>
#include <cstdlib>
#include <string>
#include <vector>

#include "textdiar/errors.h"
#include "textdiar/simd/kernels.h"

namespace textdiar::simd {

namespace {

std::vector<Isa> detect() {
  std::vector<Isa> out{Isa::kScalar};
#if defined(TEXTDIAR_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) out.push_back(Isa::kAvx2);
#endif
#if defined(TEXTDIAR_HAVE_NEON)
  out.push_back(Isa::kNeon);
#endif
  return out;
}

const std::vector<Isa>& available() {
  static const std::vector<Isa> isas = detect();
  return isas;
}

bool is_available(Isa isa) {
  for (Isa a : available()) {
    if (a == isa) return true;
  }
  return false;
}

Isa initial_isa() {
  if (const char* env = std::getenv("TEXTDIAR_ISA")) {
    const std::string want(env);
    for (Isa a : available()) {
      if (to_string(a) == want) return a;
    }
  }
  return available().back();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

const KernelTable& table() { return kernels_for(active().load()); }

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

std::span<const Isa> available_isas() { return available(); }

Isa active_isa() { return active().load(); }

void set_active_isa(Isa isa) {
  if (!is_available(isa)) {
    throw_config("SIMD variant '" + std::string(to_string(isa)) +
                 "' is not available on this host");
  }
  active().store(isa);
}

const KernelTable& kernels_for(Isa isa) {
  switch (isa) {
#if defined(TEXTDIAR_HAVE_AVX2)
    case Isa::kAvx2:
      return avx2::kTable;
#endif
#if defined(TEXTDIAR_HAVE_NEON)
    case Isa::kNeon:
      return neon::kTable;
#endif
    default:
      return scalar::kTable;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw_validation("dot: size mismatch");
  return table().dot(x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) {
  return table().sum_squares(x.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw_validation("axpy: size mismatch");
  table().axpy(a, x.data(), y.data(), x.size());
}

void decay_step(std::span<double> w, std::span<const double> g, double lr,
                double l2) {
  if (w.size() != g.size()) throw_validation("decay_step: size mismatch");
  table().decay_step(w.data(), g.data(), lr, l2, w.size());
}

void scale(double a, std::span<double> x) {
  table().scale(a, x.data(), x.size());
}

}  // namespace textdiar::simd
