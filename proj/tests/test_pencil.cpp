#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "stokeswave/eigensolver.hpp"
#include "stokeswave/pencil.hpp"

#ifdef STOKESWAVE_HAVE_EIGEN
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#endif

using namespace stokeswave;

namespace {

GridFunction random_band_limited(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cdouble> c(n / 2 + 1, cdouble(0.0));
  c[0] = u(rng);
  for (std::size_t k = 1; k <= n / 4; ++k) c[k] = cdouble(u(rng), u(rng));
  return GridFunction::from_spectrum(c, n);
}

StokesWave small_wave(std::size_t n, double a) {
  return newton_solve(small_amplitude_eta(n, a), small_amplitude_speed(a));
}

StokesWave flat_wave(std::size_t n, double c) {
  return StokesWave{GridFunction(n), c, 0.0, 0.0};
}

// eigenvalues of the flat-water pencil: lambda = i (c n +- sqrt(n)) and the
// reflections for -n, for every integer mode n >= 0 (n = 0 is the zero
// eigenvalue of the gauge symmetry, numerically a defective block)
std::vector<std::complex<double>> flat_dispersion(double c, std::size_t n_max) {
  std::vector<std::complex<double>> out;
  out.push_back({0.0, 0.0});
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double root = std::sqrt(static_cast<double>(n));
    const double cn = c * static_cast<double>(n);
    out.push_back({0.0, cn + root});
    out.push_back({0.0, cn - root});
    out.push_back({0.0, -(cn + root)});
    out.push_back({0.0, -(cn - root)});
  }
  return out;
}

#ifdef STOKESWAVE_HAVE_EIGEN
// dense matrices of the discretized pencil, by applying the operators to
// the standard basis; the eigensolve below is then an independent QZ route
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> dense_pencil(const PencilOperators& ops) {
  const long n = static_cast<long>(ops.size());
  const long dim = 2 * n;
  Eigen::MatrixXd A(dim, dim), B(dim, dim);
  for (long j = 0; j < dim; ++j) {
    std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    PencilVector x{GridFunction(std::vector<double>(e.begin(), e.begin() + n)),
                   GridFunction(std::vector<double>(e.begin() + n, e.end()))};
    PencilVector ax = ops.apply_A(x);
    PencilVector bx = ops.apply_B(x);
    for (long i = 0; i < n; ++i) {
      A(i, j) = ax.v[static_cast<std::size_t>(i)];
      A(n + i, j) = ax.w[static_cast<std::size_t>(i)];
      B(i, j) = bx.v[static_cast<std::size_t>(i)];
      B(n + i, j) = bx.w[static_cast<std::size_t>(i)];
    }
  }
  return {A, B};
}

std::vector<std::complex<double>> dense_eigenvalues(const PencilOperators& ops) {
  auto [A, B] = dense_pencil(ops);
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
  ges.compute(A, B, false);
  std::vector<std::complex<double>> out;
  for (long i = 0; i < ges.alphas().size(); ++i) {
    const std::complex<double> alpha = ges.alphas()(i);
    const double beta = ges.betas()(i);
    if (std::abs(beta) > 1e-12) out.push_back(alpha / beta);
  }
  return out;
}
#endif

}  // namespace

TEST_CASE("M and M* are an adjoint pair", "[pencil]") {
  const std::size_t n = 128;
  auto wave = small_wave(n, 0.08);
  PencilOperators ops(wave);
  std::mt19937 rng(4);
  for (int t = 0; t < 8; ++t) {
    auto f = random_band_limited(n, rng);
    auto g = random_band_limited(n, rng);
    const double scale = norm_l2(f) * norm_l2(g);
    REQUIRE(std::abs(inner(f, ops.apply_M(g)) - inner(ops.apply_M_star(f), g)) <=
            1e-11 * scale);
  }
}

TEST_CASE("M eta' = eta' and M* 1 = 1 + 2 K eta", "[pencil]") {
  const std::size_t n = 128;
  auto wave = small_wave(n, 0.08);
  PencilOperators ops(wave);

  auto ep = ops.eta_prime();
  REQUIRE(norm_l2(ops.apply_M(ep) - ep) <= 1e-11 * std::max(1.0, norm_l2(ep)));

  auto one = GridFunction::sample(n, [](double) { return 1.0; });
  REQUIRE(norm_l2(ops.apply_M_star(one) - ops.one_plus_2keta()) <= 1e-11);
}

TEST_CASE("flat water B-inverse is explicit", "[pencil]") {
  const std::size_t n = 64;
  const double c = 1.2;
  PencilOperators ops(flat_wave(n, c));
  std::mt19937 rng(10);
  auto r1 = random_band_limited(n, rng);
  auto r2 = random_band_limited(n, rng);
  auto sol = ops.apply_B_inverse({r1, r2});
  REQUIRE(norm_l2(sol.v - r1) <= 1e-11);
  REQUIRE(norm_l2(sol.w - (r2 + (2.0 * c) * hilbert(r1))) <= 1e-11);
}

TEST_CASE("B composed with B-inverse is the identity", "[pencil]") {
  const std::size_t n = 128;
  auto wave = small_wave(n, 0.08);
  PencilOperators ops(wave);
  std::mt19937 rng(11);
  for (int t = 0; t < 3; ++t) {
    PencilVector r{random_band_limited(n, rng), random_band_limited(n, rng)};
    auto back = ops.apply_B(ops.apply_B_inverse(r));
    REQUIRE(norm_l2(back - r) <= 1e-11 * std::max(1.0, norm_l2(r)));
  }
  // round trip on the known kernel vector
  PencilVector kv{ops.eta_prime(), GridFunction(n)};
  auto round = ops.apply_B_inverse(ops.apply_B(kv));
  REQUIRE(norm_l2(round - kv) <= 1e-11 * std::max(1.0, norm_l2(kv)));
}

TEST_CASE("kernel of A is spanned by (eta', 0) and (0, 1)", "[pencil]") {
  const std::size_t n = 128;
  auto wave = small_wave(n, 0.08);
  PencilOperators ops(wave);

  PencilVector k1{ops.eta_prime(), GridFunction(n)};
  PencilVector k2{GridFunction(n), GridFunction::sample(n, [](double) { return 1.0; })};
  const double floor = 0.5 * static_cast<double>(n) * wave.residual_norm;
  REQUIRE(norm_l2(ops.apply_A(k1)) <= std::max(1e-10, floor));
  REQUIRE(norm_l2(ops.apply_A(k2)) == 0.0);
}

TEST_CASE("second kernel chain: A(-1, 0) = B(0, 1) exactly", "[pencil]") {
  const std::size_t n = 128;
  auto wave = small_wave(n, 0.08);
  PencilOperators ops(wave);
  auto one = GridFunction::sample(n, [](double) { return 1.0; });
  PencilVector lhs = ops.apply_A({-1.0 * one, GridFunction(n)});
  PencilVector rhs = ops.apply_B({GridFunction(n), one});
  REQUIRE(norm_l2(lhs - rhs) <= 1e-13);
}

TEST_CASE("constraint residuals vanish on the symmetry directions", "[pencil]") {
  const std::size_t n = 128;
  auto wave = small_wave(n, 0.08);
  PencilOperators ops(wave);
  auto one = GridFunction::sample(n, [](double) { return 1.0; });

  auto [a1, a2] = ops.constraint_residuals(ops.eta_prime(), GridFunction(n));
  REQUIRE(std::abs(a1) <= 1e-14);
  REQUIRE(std::abs(a2) <= 1e-14);
  auto [b1, b2] = ops.constraint_residuals(GridFunction(n), one);
  REQUIRE(std::abs(b1) <= 1e-14);
  REQUIRE(std::abs(b2) <= 1e-14);
}

TEST_CASE("flat-water spectrum matches the dispersion relation", "[pencil]") {
  const std::size_t n = 64;
  const double c = 1.05;
  PencilOperators ops(flat_wave(n, c));

  auto res = eigen_near(ops, {0.0, 0.5}, 4);
  REQUIRE(res.pairs.size() == 4);
  auto analytic = flat_dispersion(c, n / 4);
  for (const auto& p : res.pairs) {
    REQUIRE(p.residual <= 1e-8);
    double best = 1e300;
    for (const auto& a : analytic) best = std::min(best, std::abs(p.lambda - a));
    REQUIRE(best <= 2e-8);  // the defective zero block splits at sqrt(eps)
  }
  // the nearest eigenvalue to 0.5i is i(2c - sqrt(2))
  REQUIRE(std::abs(res.pairs[0].lambda - std::complex<double>(0.0, 2 * c - std::sqrt(2.0))) <=
          1e-8);
}

TEST_CASE("small-amplitude spectrum is purely imaginary near the origin", "[pencil]") {
  const std::size_t n = 128;
  auto wave = small_wave(n, amplitude_for_steepness(0.05));
  PencilOperators ops(wave);

  auto res = eigen_near(ops, {0.05, 0.0}, 8);
  REQUIRE(res.pairs.size() >= 6);
  for (const auto& p : res.pairs) {
    REQUIRE(p.residual <= 1e-8);
    if (std::abs(p.lambda) > 1e-8) {
      REQUIRE(std::abs(p.lambda.real()) <= 1e-8);  // no unstable modes below s1
      REQUIRE(p.constraint1 <= 1e-8);
      REQUIRE(p.constraint2 <= 1e-8);
    }
  }
  // reversibility: +-lambda both present among the nonzero eigenvalues
  for (const auto& p : res.pairs) {
    if (std::abs(p.lambda) <= 1e-8) continue;
    bool found = false;
    for (const auto& q : res.pairs)
      if (std::abs(q.lambda + p.lambda) <= 1e-7) found = true;
    REQUIRE(found);
  }
}

TEST_CASE("spectra from sigma and -sigma agree", "[pencil]") {
  const std::size_t n = 64;
  auto wave = small_wave(n, 0.1);
  PencilOperators ops(wave);
  auto plus = eigen_near(ops, {0.04, 0.0}, 4);
  auto minus = eigen_near(ops, {-0.04, 0.0}, 4);
  REQUIRE(plus.pairs.size() == 4);
  REQUIRE(minus.pairs.size() == 4);
  for (const auto& p : plus.pairs) {
    double best = 1e300;
    for (const auto& q : minus.pairs) best = std::min(best, std::abs(p.lambda - q.lambda));
    REQUIRE(best <= 1e-7);
  }
}

#ifdef STOKESWAVE_HAVE_EIGEN
TEST_CASE("matrix-free eigenvalues match a dense QZ solve", "[pencil]") {
  const std::size_t n = 64;
  auto wave = small_wave(n, 0.12);
  PencilOperators ops(wave);
  auto dense = dense_eigenvalues(ops);

  auto res = eigen_near(ops, {0.07, 0.0}, 10);
  REQUIRE(res.pairs.size() >= 8);
  for (const auto& p : res.pairs) {
    double best = 1e300;
    for (const auto& d : dense) best = std::min(best, std::abs(p.lambda - d));
    REQUIRE(best <= 1e-8);
  }
}

TEST_CASE("generalized kernel of the dense pencil has dimension 4", "[pencil]") {
  const std::size_t n = 64;
  auto wave = small_wave(n, 0.1);
  PencilOperators ops(wave);
  auto dense = dense_eigenvalues(ops);
  std::size_t zeros = 0;
  for (const auto& d : dense)
    if (std::abs(d) < 1e-6) ++zeros;
  REQUIRE(zeros == 4);
}
#endif
