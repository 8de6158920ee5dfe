#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "stokeswave/smalldense.hpp"

#ifdef STOKESWAVE_HAVE_EIGEN
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#endif

using namespace stokeswave;
using smalldense::cdouble;

namespace {

// greedy nearest matching between two eigenvalue sets
double match_distance(std::vector<cdouble> a, std::vector<cdouble> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (const auto& x : a) {
    double best = 1e300;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double d = std::abs(x - b[i]);
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<long>(best_i));
  }
  return worst;
}

// companion matrix (upper Hessenberg) of the monic polynomial with the
// given roots; complex roots must come in conjugate pairs so the
// coefficients are real
std::vector<double> companion_for_roots(const std::vector<cdouble>& roots) {
  std::vector<cdouble> coeff{1.0};
  for (const auto& r : roots) {
    std::vector<cdouble> next(coeff.size() + 1, cdouble(0.0));
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      next[i] += coeff[i] * (-r);
      next[i + 1] += coeff[i];
    }
    coeff = std::move(next);
  }
  const std::size_t n = roots.size();
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + n - 1] = -coeff[i].real();
  for (std::size_t i = 1; i < n; ++i) h[i * n + i - 1] = 1.0;
  return h;
}

}  // namespace

TEST_CASE("hessenberg eigenvalues recover known polynomial roots", "[smalldense]") {
  std::vector<cdouble> roots{
      {1.0, 0.0}, {2.0, 0.0}, {-0.5, 0.0}, {3.0, 4.0}, {3.0, -4.0}, {0.25, 1.5}, {0.25, -1.5}};
  auto h = companion_for_roots(roots);
  auto eig = smalldense::hessenberg_eigenvalues(h, roots.size());
  REQUIRE(match_distance(roots, eig) < 1e-9);
}

TEST_CASE("hessenberg eigenvalues on random matrices", "[smalldense]") {
  std::mt19937 rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {5u, 20u, 60u}) {
    std::vector<double> h(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) h[i * n + j] = u(rng);

    auto eig = smalldense::hessenberg_eigenvalues(h, n);
    REQUIRE(eig.size() == n);

    // the eigenvalue sum must reproduce the trace
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += h[i * n + i];
    cdouble s(0.0);
    for (const auto& e : eig) s += e;
    REQUIRE(std::abs(s.real() - tr) < 1e-10 * (1.0 + std::abs(tr)));
    REQUIRE(std::abs(s.imag()) < 1e-10);

#ifdef STOKESWAVE_HAVE_EIGEN
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(static_cast<long>(i), static_cast<long>(j)) = h[i * n + j];
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<cdouble> ref(n);
    for (std::size_t i = 0; i < n; ++i) ref[i] = es.eigenvalues()(static_cast<long>(i));
    REQUIRE(match_distance(ref, eig) < 1e-8);
#endif
  }
}

TEST_CASE("hessenberg eigenvector residual", "[smalldense]") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 30;
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) h[i * n + j] = u(rng);

  auto eig = smalldense::hessenberg_eigenvalues(h, n);
  for (std::size_t which : {0u, 7u, 15u}) {
    const cdouble lam = eig[which];
    auto y = smalldense::hessenberg_eigenvector(h, n, lam);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cdouble s(0.0);
      for (std::size_t j = 0; j < n; ++j) s += h[i * n + j] * y[j];
      s -= lam * y[i];
      res += std::norm(s);
    }
    REQUIRE(std::sqrt(res) < 1e-9);
  }
}

TEST_CASE("complex lu solve", "[smalldense]") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 25;
  std::vector<cdouble> a(n * n);
  for (auto& v : a) v = cdouble(u(rng), u(rng));
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] += 4.0;
  std::vector<cdouble> b(n);
  for (auto& v : b) v = cdouble(u(rng), u(rng));

  auto a_copy = a;
  auto x = smalldense::lu_solve(a_copy, b, n);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cdouble s(0.0);
    for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
    s -= b[i];
    res += std::norm(s);
  }
  REQUIRE(std::sqrt(res) < 1e-11);
}

TEST_CASE("small real solve", "[smalldense]") {
  std::vector<double> a{2, 1, 0, 1, 3, 1, 0, 1, 4};
  std::vector<double> b{3, 5, 6};
  auto a_copy = a;
  auto x = smalldense::solve_real(a_copy, b, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += a[i * 3 + j] * x[j];
    REQUIRE(s == Catch::Approx(b[i]).margin(1e-12));
  }
}
