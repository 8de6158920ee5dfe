#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "stokeswave/fft.hpp"

namespace stokeswave {

using fft::cdouble;

/// Real 2*pi-periodic function sampled at u_j = 2*pi*j/N on a uniform grid.
/// N must be a power of two, N >= 4. Values are immutable after
/// construction; all operators below are pure and return new functions.
class GridFunction {
 public:
  explicit GridFunction(std::size_t n) : samples_(check_size(n), 0.0) {}

  explicit GridFunction(std::vector<double> samples) : samples_(std::move(samples)) {
    check_size(samples_.size());
  }

  /// Samples f(u_j) on the grid.
  template <class F>
  static GridFunction sample(std::size_t n, F&& f) {
    check_size(n);
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j)
      s[j] = f(two_pi * static_cast<double>(j) / static_cast<double>(n));
    return GridFunction(std::move(s));
  }

  /// Reconstructs samples from a normalized half-spectrum of size n/2 + 1.
  static GridFunction from_spectrum(const std::vector<cdouble>& coeff, std::size_t n) {
    return GridFunction(fft::real_inverse(coeff, n));
  }

  std::size_t size() const { return samples_.size(); }
  double operator[](std::size_t j) const { return samples_[j]; }
  const std::vector<double>& samples() const { return samples_; }

  /// Normalized Fourier coefficients c_k, k = 0..N/2, with
  /// f(u) = sum_{|k|<=N/2} c_k e^{iku}, c_{-k} = conj(c_k).
  std::vector<cdouble> spectrum() const { return fft::real_forward(samples_); }

  /// Coefficients a_k of the cosine series f = a_0 + sum a_k cos(ku),
  /// meaningful for even functions (sine content is discarded).
  std::vector<double> cosine_coefficients() const {
    const auto c = spectrum();
    std::vector<double> a(c.size());
    a[0] = c[0].real();
    for (std::size_t k = 1; k < c.size(); ++k) a[k] = 2.0 * c[k].real();
    a[c.size() - 1] = c[c.size() - 1].real();
    return a;
  }

  static GridFunction from_cosine_coefficients(const std::vector<double>& a, std::size_t n) {
    if (a.size() != n / 2 + 1)
      throw DimensionMismatch("from_cosine_coefficients: need n/2 + 1 values");
    std::vector<cdouble> c(a.size());
    c[0] = a[0];
    for (std::size_t k = 1; k + 1 < a.size(); ++k) c[k] = 0.5 * a[k];
    c[a.size() - 1] = a[a.size() - 1];
    return from_spectrum(c, n);
  }

  double value_at_zero() const { return samples_[0]; }
  double value_at_pi() const { return samples_[size() / 2]; }

 private:
  static std::size_t check_size(std::size_t n) {
    if (!fft::is_power_of_two(n) || n < 4)
      throw InvalidArgument("GridFunction: N must be a power of two >= 4");
    return n;
  }

  std::vector<double> samples_;
};

namespace detail {

inline void check_same_size(const GridFunction& f, const GridFunction& g) {
  if (f.size() != g.size())
    throw DimensionMismatch("grid functions have different sizes");
}

/// Applies a spectral symbol and zeroes the Nyquist mode. Keeping every
/// operator output strictly below the Nyquist frequency is what makes the
/// discrete H exactly skew-adjoint and K exactly self-adjoint.
template <class Symbol>
GridFunction apply_symbol(const GridFunction& f, Symbol&& sym) {
  auto c = f.spectrum();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= sym(k);
  c.back() = 0.0;
  return GridFunction::from_spectrum(c, f.size());
}

}  // namespace detail

// --- elementwise arithmetic (pointwise, no de-aliasing) ---

inline GridFunction operator+(const GridFunction& f, const GridFunction& g) {
  detail::check_same_size(f, g);
  std::vector<double> r(f.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = f[j] + g[j];
  return GridFunction(std::move(r));
}

inline GridFunction operator-(const GridFunction& f, const GridFunction& g) {
  detail::check_same_size(f, g);
  std::vector<double> r(f.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = f[j] - g[j];
  return GridFunction(std::move(r));
}

inline GridFunction operator*(double a, const GridFunction& f) {
  std::vector<double> r(f.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = a * f[j];
  return GridFunction(std::move(r));
}

inline GridFunction operator-(const GridFunction& f) { return -1.0 * f; }

inline GridFunction shift_by(const GridFunction& f, double a) {
  std::vector<double> r(f.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = f[j] + a;
  return GridFunction(std::move(r));
}

// --- pseudo-differential operators ---

/// Periodic Hilbert transform: Fourier symbol i*sgn(k), zero mode killed.
inline GridFunction hilbert(const GridFunction& f) {
  return detail::apply_symbol(f, [](std::size_t k) {
    return k == 0 ? cdouble(0.0) : cdouble(0.0, 1.0);
  });
}

/// K = -H d/du: Fourier symbol |k|. Positive and self-adjoint.
inline GridFunction k_op(const GridFunction& f) {
  return detail::apply_symbol(
      f, [](std::size_t k) { return cdouble(static_cast<double>(k), 0.0); });
}

/// Spectral derivative d/du: Fourier symbol i*k.
inline GridFunction derivative(const GridFunction& f) {
  return detail::apply_symbol(
      f, [](std::size_t k) { return cdouble(0.0, static_cast<double>(k)); });
}

// --- inner products and norms ---

/// Normalized L^2 inner product <f,g> = (1/2pi) \oint f g du, evaluated by
/// the trapezoid rule (1/N) sum f_j g_j; exact for band-limited products.
inline double inner(const GridFunction& f, const GridFunction& g) {
  detail::check_same_size(f, g);
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * g[j];
  return s / static_cast<double>(f.size());
}

inline double mean(const GridFunction& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j];
  return s / static_cast<double>(f.size());
}

/// \oint f du = 2*pi*<1,f>.
inline double contour_integral(const GridFunction& f) { return two_pi * mean(f); }

inline double norm_l2(const GridFunction& f) { return std::sqrt(inner(f, f)); }

inline double norm_inf(const GridFunction& f) {
  double m = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) m = std::max(m, std::abs(f[j]));
  return m;
}

// --- parity projections ---

inline GridFunction project_even(const GridFunction& f) {
  const std::size_t n = f.size();
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = 0.5 * (f[j] + f[(n - j) % n]);
  return GridFunction(std::move(r));
}

inline GridFunction project_odd(const GridFunction& f) {
  const std::size_t n = f.size();
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = 0.5 * (f[j] - f[(n - j) % n]);
  return GridFunction(std::move(r));
}

// --- resampling and de-aliased products ---

/// Fourier interpolation (zero pad) or truncation to a new grid size.
/// Band-limited content below the smaller Nyquist is preserved exactly.
/// The Nyquist coefficient represents the +-N/2 cosine pair in one bin, so
/// it is halved when padding and folded (2 Re) when truncating.
inline GridFunction resample(const GridFunction& f, std::size_t n_new) {
  if (!fft::is_power_of_two(n_new) || n_new < 4)
    throw InvalidArgument("resample: N must be a power of two >= 4");
  if (n_new == f.size()) return f;
  auto c = f.spectrum();
  std::vector<cdouble> cn(n_new / 2 + 1, cdouble(0.0));
  if (n_new > f.size()) {
    for (std::size_t k = 0; k + 1 < c.size(); ++k) cn[k] = c[k];
    cn[c.size() - 1] = 0.5 * c.back().real();
  } else {
    for (std::size_t k = 0; k + 1 < cn.size(); ++k) cn[k] = c[k];
    cn.back() = 2.0 * c[cn.size() - 1].real();
  }
  return GridFunction::from_spectrum(cn, n_new);
}

/// Pointwise product computed alias-free: both factors are zero-padded to a
/// 2N grid, multiplied there, and the result truncated back to N modes (the
/// Nyquist mode is zeroed). Quadratic terms are exactly alias-free.
inline GridFunction multiply(const GridFunction& f, const GridFunction& g) {
  detail::check_same_size(f, g);
  const std::size_t n = f.size();
  const std::size_t m = 2 * n;
  const GridFunction ff = resample(f, m);
  const GridFunction gf = resample(g, m);
  std::vector<double> prod(m);
  for (std::size_t j = 0; j < m; ++j) prod[j] = ff[j] * gf[j];
  auto c = fft::real_forward(prod);
  std::vector<cdouble> ct(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) ct[k] = c[k];
  ct.back() = 0.0;
  return GridFunction::from_spectrum(ct, n);
}

/// Relative size of the top octave of the spectrum, used to decide when a
/// grid is too small for the function it carries.
inline double spectral_tail(const GridFunction& f) {
  const auto c = f.spectrum();
  const std::size_t half = c.size() - 1;  // N/2
  double tail = 0.0;
  for (std::size_t k = half / 2; k <= half; ++k) tail = std::max(tail, std::abs(c[k]));
  const double scale = norm_l2(f);
  return scale > 0.0 ? tail / scale : 0.0;
}

}  // namespace stokeswave
