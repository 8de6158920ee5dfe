#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "stokeswave/grid.hpp"

using namespace stokeswave;

namespace {

GridFunction random_band_limited(std::size_t n, std::mt19937& rng,
                                 std::size_t max_mode = 0) {
  if (max_mode == 0) max_mode = n / 4;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cdouble> c(n / 2 + 1, cdouble(0.0));
  c[0] = u(rng);
  for (std::size_t k = 1; k <= max_mode; ++k) c[k] = cdouble(u(rng), u(rng));
  return GridFunction::from_spectrum(c, n);
}

// Naive O(N^2) DFT, the independent oracle for the fast transform.
std::vector<cdouble> naive_spectrum(const GridFunction& f) {
  const std::size_t n = f.size();
  std::vector<cdouble> c(n / 2 + 1, cdouble(0.0));
  for (std::size_t k = 0; k <= n / 2; ++k) {
    cdouble s(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = -two_pi * static_cast<double>(k * j) / static_cast<double>(n);
      s += f[j] * cdouble(std::cos(a), std::sin(a));
    }
    c[k] = s / static_cast<double>(n);
  }
  return c;
}

double max_abs_diff(const GridFunction& f, const GridFunction& g) {
  return norm_inf(f - g);
}

}  // namespace

TEST_CASE("fast transform matches naive DFT", "[grid]") {
  std::mt19937 rng(12345);
  for (std::size_t n : {8u, 64u, 128u}) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> s(n);
    for (auto& x : s) x = u(rng);
    GridFunction f(s);
    const auto fast = f.spectrum();
    const auto slow = naive_spectrum(f);
    for (std::size_t k = 0; k < fast.size(); ++k)
      REQUIRE(std::abs(fast[k] - slow[k]) < 1e-13);
  }
}

TEST_CASE("spectrum round trip is exact to 100 eps", "[grid]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {4u, 16u, 256u, 1024u}) {
    std::vector<double> s(n);
    for (auto& x : s) x = u(rng);
    GridFunction f(s);
    GridFunction g = GridFunction::from_spectrum(f.spectrum(), n);
    const double tol = 100.0 * std::numeric_limits<double>::epsilon() * norm_inf(f);
    REQUIRE(max_abs_diff(f, g) <= tol);
  }
}

TEST_CASE("grid size must be a power of two >= 4", "[grid]") {
  REQUIRE_THROWS_AS(GridFunction(std::vector<double>(6, 0.0)), InvalidArgument);
  REQUIRE_THROWS_AS(GridFunction(std::vector<double>(2, 0.0)), InvalidArgument);
  REQUIRE_NOTHROW(GridFunction(std::vector<double>(4, 0.0)));
}

TEST_CASE("hilbert transform on trigonometric modes", "[grid]") {
  const std::size_t n = 64;
  auto cosu = GridFunction::sample(n, [](double u) { return std::cos(u); });
  auto sinu = GridFunction::sample(n, [](double u) { return std::sin(u); });
  auto one = GridFunction::sample(n, [](double) { return 1.0; });

  REQUIRE(max_abs_diff(hilbert(cosu), -1.0 * sinu) < 1e-14);
  REQUIRE(max_abs_diff(hilbert(sinu), cosu) < 1e-14);
  REQUIRE(norm_inf(hilbert(one)) < 1e-15);
}

TEST_CASE("k_op on trigonometric modes", "[grid]") {
  const std::size_t n = 64;
  auto cos3 = GridFunction::sample(n, [](double u) { return std::cos(3 * u); });
  auto one = GridFunction::sample(n, [](double) { return 1.0; });
  auto mix = GridFunction::sample(n, [](double u) { return std::cos(u) + std::sin(2 * u); });
  auto mix_k = GridFunction::sample(n, [](double u) { return std::cos(u) + 2 * std::sin(2 * u); });

  REQUIRE(max_abs_diff(k_op(cos3), 3.0 * cos3) < 1e-13);
  REQUIRE(norm_inf(k_op(one)) < 1e-15);
  REQUIRE(max_abs_diff(k_op(mix), mix_k) < 1e-13);
}

TEST_CASE("spectral derivative", "[grid]") {
  const std::size_t n = 64;
  auto sinu = GridFunction::sample(n, [](double u) { return std::sin(u); });
  auto cosu = GridFunction::sample(n, [](double u) { return std::cos(u); });
  auto one = GridFunction::sample(n, [](double) { return 1.0; });
  auto cos2 = GridFunction::sample(n, [](double u) { return std::cos(2 * u); });
  auto m2sin2 = GridFunction::sample(n, [](double u) { return -2.0 * std::sin(2 * u); });

  REQUIRE(max_abs_diff(derivative(sinu), cosu) < 1e-13);
  REQUIRE(norm_inf(derivative(one)) < 1e-15);
  REQUIRE(max_abs_diff(derivative(cos2), m2sin2) < 1e-13);
}

TEST_CASE("normalized inner product", "[grid]") {
  const std::size_t n = 64;
  auto cosu = GridFunction::sample(n, [](double u) { return std::cos(u); });
  auto one = GridFunction::sample(n, [](double) { return 1.0; });

  REQUIRE(inner(cosu, cosu) == Catch::Approx(0.5).margin(1e-15));
  REQUIRE(std::abs(inner(one, cosu)) < 1e-16);
  REQUIRE(inner(cosu, k_op(cosu)) == Catch::Approx(0.5).margin(1e-14));

  GridFunction other(32);
  REQUIRE_THROWS_AS(inner(cosu, other), DimensionMismatch);
}

TEST_CASE("parity projections", "[grid]") {
  const std::size_t n = 64;
  auto cosu = GridFunction::sample(n, [](double u) { return std::cos(u); });
  auto sinu = GridFunction::sample(n, [](double u) { return std::sin(u); });
  auto mixed = GridFunction::sample(n, [](double u) { return 1.0 + std::sin(u); });
  auto one = GridFunction::sample(n, [](double) { return 1.0; });

  REQUIRE(max_abs_diff(project_even(cosu), cosu) < 1e-15);
  REQUIRE(norm_inf(project_odd(cosu)) < 1e-15);
  REQUIRE(norm_inf(project_even(sinu)) < 1e-15);
  REQUIRE(max_abs_diff(project_odd(sinu), sinu) < 1e-15);
  REQUIRE(max_abs_diff(project_even(mixed), one) < 1e-15);
  REQUIRE(max_abs_diff(project_odd(mixed), sinu) < 1e-15);

  std::mt19937 rng(99);
  auto f = random_band_limited(n, rng);
  REQUIRE(max_abs_diff(project_even(f) + project_odd(f), f) < 1e-15);
}

TEST_CASE("resample preserves band-limited content", "[grid]") {
  auto cos8 = GridFunction::sample(8, [](double u) { return std::cos(u); });
  auto cos16 = GridFunction::sample(16, [](double u) { return std::cos(u); });
  REQUIRE(max_abs_diff(resample(cos8, 16), cos16) < 1e-14);

  auto cos7 = GridFunction::sample(16, [](double u) { return std::cos(7 * u); });
  REQUIRE(norm_inf(resample(cos7, 8)) < 1e-14);

  std::mt19937 rng(3);
  auto f = random_band_limited(64, rng, 16);
  auto back = resample(resample(f, 256), 64);
  REQUIRE(max_abs_diff(back, f) < 1e-14);

  // exactly-Nyquist content survives an up-down round trip
  auto nyq = GridFunction::sample(16, [](double u) { return std::cos(8 * u); });
  REQUIRE(max_abs_diff(resample(resample(nyq, 64), 16), nyq) < 1e-14);
  REQUIRE(max_abs_diff(resample(nyq, 32),
                       GridFunction::sample(32, [](double u) { return std::cos(8 * u); })) <
          1e-14);
}

TEST_CASE("de-aliased product of cosines", "[grid]") {
  const std::size_t n = 32;
  auto cosu = GridFunction::sample(n, [](double u) { return std::cos(u); });
  auto expect = GridFunction::sample(n, [](double u) { return 0.5 * (1.0 + std::cos(2 * u)); });
  REQUIRE(max_abs_diff(multiply(cosu, cosu), expect) < 1e-15);

  // Near-Nyquist factors must truncate, never alias back into low modes.
  const std::size_t k = n / 2 - 1;
  auto hi = GridFunction::sample(n, [&](double u) { return std::cos(k * u); });
  auto prod = multiply(hi, hi);
  auto expect_hi = GridFunction::sample(n, [](double) { return 0.5; });
  REQUIRE(max_abs_diff(prod, expect_hi) < 1e-14);
}

TEST_CASE("operator identities on random band-limited functions", "[grid]") {
  std::mt19937 rng(2024);
  const std::size_t n = 256;
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_band_limited(n, rng);
    auto g = random_band_limited(n, rng);
    const double scale = norm_l2(f) * norm_l2(g);

    // K is self-adjoint, H is skew-adjoint.
    REQUIRE(std::abs(inner(f, k_op(g)) - inner(k_op(f), g)) <= 1e-12 * scale);
    REQUIRE(std::abs(inner(f, hilbert(g)) + inner(hilbert(f), g)) <= 1e-12 * scale);

    // H^2 = -Id on zero-mean functions.
    auto hh = hilbert(hilbert(f));
    auto f0 = shift_by(f, -mean(f));
    REQUIRE(norm_l2(hh + f0) <= 1e-12 * norm_l2(f));

    // K = -H d/du.
    auto composite = -1.0 * hilbert(derivative(f));
    REQUIRE(norm_l2(composite - k_op(f)) <= 1e-12 * norm_l2(k_op(f)) + 1e-15);

    // Positivity.
    REQUIRE(inner(f, k_op(f)) >= 0.0);
  }
}

TEST_CASE("cosine coefficient round trip", "[grid]") {
  std::mt19937 rng(5);
  const std::size_t n = 64;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(n / 2 + 1);
  for (auto& x : a) x = u(rng);
  a.back() = 0.0;  // Nyquist kept zero by the operator pipeline
  auto f = GridFunction::from_cosine_coefficients(a, n);
  auto b = f.cosine_coefficients();
  for (std::size_t k = 0; k < a.size(); ++k)
    REQUIRE(a[k] == Catch::Approx(b[k]).margin(1e-14));
  REQUIRE(norm_inf(project_odd(f)) < 1e-15 * norm_inf(f));
}
