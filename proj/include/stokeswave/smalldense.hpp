#pragma once

// Small dense kernels backing the Arnoldi eigensolver: eigenvalues of the
// projected Hessenberg matrix, eigenvectors by inverse iteration, and tiny
// real solves for fits and deflation systems. Sizes here are O(100), so
// simplicity and robustness win over blocking.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "stokeswave/errors.hpp"

namespace stokeswave::smalldense {

using cdouble = std::complex<double>;

namespace detail {

inline std::pair<cdouble, cdouble> eig2x2(cdouble a, cdouble b, cdouble c, cdouble d) {
  const cdouble tr = a + d;
  const cdouble disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

}  // namespace detail

/// Eigenvalues of a real upper Hessenberg matrix (row-major n x n) by the
/// shifted complex QR iteration with deflation. Order is unspecified.
inline std::vector<cdouble> hessenberg_eigenvalues(const std::vector<double>& h_in,
                                                   std::size_t n) {
  if (h_in.size() != n * n) throw InvalidArgument("hessenberg_eigenvalues: bad size");
  std::vector<cdouble> h(n * n);
  for (std::size_t i = 0; i < n * n; ++i) h[i] = h_in[i];
  auto at = [&](std::size_t i, std::size_t j) -> cdouble& { return h[i * n + j]; };

  const double eps = std::numeric_limits<double>::epsilon();
  auto negligible = [&](std::size_t k) {
    const double sub = std::abs(at(k, k - 1));
    const double scale = std::abs(at(k, k)) + std::abs(at(k - 1, k - 1));
    return sub <= eps * (scale + sub) || sub < 1e-300;
  };

  std::vector<cdouble> eig;
  eig.reserve(n);
  if (n == 0) return eig;

  std::size_t hi = n - 1;
  std::size_t iter_guard = 0;
  const std::size_t max_total = 80 * n + 400;

  while (true) {
    // peel off converged trailing eigenvalues
    while (hi > 0 && negligible(hi)) {
      eig.push_back(at(hi, hi));
      --hi;
    }
    if (hi == 0) {
      eig.push_back(at(0, 0));
      return eig;
    }

    // active block lo..hi
    std::size_t lo = hi;
    while (lo > 0 && !negligible(lo)) --lo;

    if (hi - lo == 1) {
      const auto [m1, m2] = detail::eig2x2(at(lo, lo), at(lo, hi), at(hi, lo), at(hi, hi));
      eig.push_back(m1);
      eig.push_back(m2);
      if (lo == 0) return eig;
      hi = lo - 1;
      continue;
    }

    if (++iter_guard > max_total)
      throw Error("hessenberg_eigenvalues: QR iteration did not converge");

    // Wilkinson shift from the trailing 2x2 of the active block
    cdouble shift;
    {
      const auto [m1, m2] =
          detail::eig2x2(at(hi - 1, hi - 1), at(hi - 1, hi), at(hi, hi - 1), at(hi, hi));
      shift = std::abs(m1 - at(hi, hi)) < std::abs(m2 - at(hi, hi)) ? m1 : m2;
      if (iter_guard % 30 == 0) {
        shift = cdouble(std::abs(at(hi, hi - 1)) + std::abs(at(hi - 1, hi - 2)), 0.0) +
                at(hi, hi);
      }
    }

    // explicit single-shift QR step on the block: H - mu = QR, H <- RQ + mu
    for (std::size_t k = lo; k <= hi; ++k) at(k, k) -= shift;
    std::vector<double> cs(hi, 0.0);
    std::vector<cdouble> sn(hi, cdouble(0.0));
    for (std::size_t k = lo; k < hi; ++k) {
      const cdouble f = at(k, k), g = at(k + 1, k);
      const double r = std::hypot(std::abs(f), std::abs(g));
      double c_k = 1.0;
      cdouble s_k(0.0);
      if (r > 0.0) {
        if (std::abs(f) == 0.0) {
          c_k = 0.0;
          s_k = std::conj(g) / std::abs(g);
        } else {
          c_k = std::abs(f) / r;
          s_k = (f / std::abs(f)) * (std::conj(g) / r);
        }
      }
      cs[k] = c_k;
      sn[k] = s_k;
      for (std::size_t j = k; j <= hi; ++j) {
        const cdouble t1 = at(k, j), t2 = at(k + 1, j);
        at(k, j) = c_k * t1 + s_k * t2;
        at(k + 1, j) = -std::conj(s_k) * t1 + c_k * t2;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t bottom = std::min(k + 2, hi);
      for (std::size_t i = lo; i <= bottom; ++i) {
        const cdouble t1 = at(i, k), t2 = at(i, k + 1);
        at(i, k) = cs[k] * t1 + std::conj(sn[k]) * t2;
        at(i, k + 1) = -sn[k] * t1 + cs[k] * t2;
      }
    }
    for (std::size_t k = lo; k <= hi; ++k) at(k, k) += shift;
  }
}

/// Solves the complex dense system A x = b by LU with partial pivoting.
/// A is row-major n x n and is destroyed.
inline std::vector<cdouble> lu_solve(std::vector<cdouble>& a, std::vector<cdouble> b,
                                     std::size_t n) {
  if (a.size() != n * n || b.size() != n) throw InvalidArgument("lu_solve: bad sizes");
  auto at = [&](std::size_t i, std::size_t j) -> cdouble& { return a[i * n + j]; };
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(at(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(at(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) {
      at(k, k) = 1e-300;  // keep going; caller uses residuals to judge
    } else if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cdouble m = at(i, k) / at(k, k);
      if (m == cdouble(0.0)) continue;
      at(i, k) = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= m * at(k, j);
      b[i] -= m * b[k];
    }
  }
  std::vector<cdouble> x(n);
  for (std::size_t i = n; i-- > 0;) {
    cdouble s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= at(i, j) * x[j];
    x[i] = s / at(i, i);
  }
  return x;
}

/// Eigenvector of a real Hessenberg matrix for a given (approximate)
/// eigenvalue, by a few steps of inverse iteration with a complex shift.
inline std::vector<cdouble> hessenberg_eigenvector(const std::vector<double>& h,
                                                   std::size_t n, cdouble lambda) {
  if (h.size() != n * n) throw InvalidArgument("hessenberg_eigenvector: bad size");
  // slightly perturb the shift so the LU stays usable at a converged value
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(h[i * n + i]));
  const double delta = (scale + std::abs(lambda)) * 1e-13;

  std::vector<cdouble> x(n, cdouble(1.0, 0.0));
  double xn = std::sqrt(static_cast<double>(n));
  for (auto& v : x) v /= xn;

  for (int pass = 0; pass < 3; ++pass) {
    std::vector<cdouble> a(n * n);
    for (std::size_t i = 0; i < n * n; ++i) a[i] = h[i];
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] -= lambda + cdouble(delta, delta);
    x = lu_solve(a, std::move(x), n);
    double norm = 0.0;
    for (const auto& v : x) norm += std::norm(v);
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("inverse iteration failed");
    for (auto& v : x) v /= norm;
  }
  return x;
}

/// Gaussian elimination with partial pivoting for small real systems
/// (stencil weights, least-squares normal equations). A is row-major and
/// destroyed.
inline std::vector<double> solve_real(std::vector<double>& a, std::vector<double> b,
                                      std::size_t n) {
  if (a.size() != n * n || b.size() != n) throw InvalidArgument("solve_real: bad sizes");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) throw Error("solve_real: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i * n + k] / a[k * n + k];
      if (m == 0.0) continue;
      a[i * n + k] = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

}  // namespace stokeswave::smalldense
