#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "textdiar/errors.h"
#include "textdiar/simd/kernels.h"

using namespace textdiar;
using namespace textdiar::simd;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels match definitions") {
  std::vector<double> x{1, 2, 3}, y{4, 5, 6};
  const auto& k = scalar::kTable;
  CHECK(k.dot(x.data(), y.data(), 3) == 32.0);
  CHECK(k.sum_squares(x.data(), 3) == 14.0);
  k.axpy(2.0, x.data(), y.data(), 3);
  CHECK(y == std::vector<double>{6, 9, 12});
  std::vector<double> w{1, -2}, g{0.5, 0.5};
  k.decay_step(w.data(), g.data(), 0.1, 0.5, 2);
  CHECK(w[0] == doctest::Approx(1 - 0.1 * (0.5 + 0.5)));
  CHECK(w[1] == doctest::Approx(-2 - 0.1 * (0.5 - 1.0)));
  k.scale(-2.0, w.data(), 2);
  CHECK(w[0] == doctest::Approx(-1.8));
}

TEST_CASE("every available variant agrees with the scalar reference") {
  std::mt19937_64 rng(3);
  const auto& ref = scalar::kTable;
  for (Isa isa : available_isas()) {
    CAPTURE(to_string(isa));
    const auto& k = kernels_for(isa);
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 1000, 1023}) {
      CAPTURE(n);
      auto x = random_vector(rng, n);
      auto y = random_vector(rng, n);

      double d_ref = ref.dot(x.data(), y.data(), n);
      double d = k.dot(x.data(), y.data(), n);
      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::fabs(x[i] * y[i]);
      CHECK(std::fabs(d - d_ref) <= 1e-13 * (mag + 1));

      double s_ref = ref.sum_squares(x.data(), n);
      double s = k.sum_squares(x.data(), n);
      CHECK(std::fabs(s - s_ref) <= 1e-13 * (s_ref + 1));

      auto y1 = y, y2 = y;
      ref.axpy(0.37, x.data(), y1.data(), n);
      k.axpy(0.37, x.data(), y2.data(), n);
      CHECK(bitwise_equal(y1, y2));

      auto w1 = x, w2 = x;
      ref.decay_step(w1.data(), y.data(), 0.05, 1e-3, n);
      k.decay_step(w2.data(), y.data(), 0.05, 1e-3, n);
      CHECK(bitwise_equal(w1, w2));

      auto z1 = x, z2 = x;
      ref.scale(-1.25, z1.data(), n);
      k.scale(-1.25, z2.data(), n);
      CHECK(bitwise_equal(z1, z2));
    }
  }
}

TEST_CASE("kernels handle unaligned views") {
  std::mt19937_64 rng(9);
  auto x = random_vector(rng, 101);
  auto y = random_vector(rng, 101);
  for (Isa isa : available_isas()) {
    const auto& k = kernels_for(isa);
    for (std::size_t off = 0; off < 4; ++off) {
      auto a = y, b = y;
      scalar::kTable.axpy(1.5, x.data() + off, a.data() + off, 97);
      k.axpy(1.5, x.data() + off, b.data() + off, 97);
      CHECK(bitwise_equal(a, b));
    }
  }
}

TEST_CASE("dispatch can be pinned to each variant") {
  Isa original = active_isa();
  std::vector<double> x{1, 2, 3, 4, 5}, y{5, 4, 3, 2, 1};
  for (Isa isa : available_isas()) {
    set_active_isa(isa);
    CHECK(active_isa() == isa);
    CHECK(dot(x, y) == doctest::Approx(35.0));
  }
  set_active_isa(original);
  CHECK(available_isas().front() == Isa::kScalar);
}

TEST_CASE("pinning an unavailable variant is a config error") {
  bool has_neon = false;
  for (Isa isa : available_isas()) has_neon |= isa == Isa::kNeon;
  if (!has_neon) {
    try {
      set_active_isa(Isa::kNeon);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfig);
    }
  }
}
