#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <unordered_map>
#include <vector>

#include "stokeswave/errors.hpp"

namespace stokeswave {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace stokeswave

namespace stokeswave::fft {

using cdouble = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

/// Twiddle factors and bit-reversal permutation for one transform size.
/// Tables are cached per thread, so transforms are safe to run concurrently.
struct Tables {
  std::size_t n = 0;
  std::vector<cdouble> twiddle;   // exp(-2*pi*i*j/n), j < n/2
  std::vector<std::size_t> rev;   // bit-reversal permutation
};

inline const Tables& tables_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, Tables> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Tables t;
  t.n = n;
  t.twiddle.resize(n / 2);
  const double step = -two_pi / static_cast<double>(n);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double a = step * static_cast<double>(j);
    t.twiddle[j] = cdouble(std::cos(a), std::sin(a));
  }
  t.rev.resize(n);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    t.rev[i] = r;
  }
  return cache.emplace(n, std::move(t)).first->second;
}

/// In-place radix-2 complex transform. Forward uses e^{-i...}; the inverse
/// conjugates twiddles and applies the 1/n scaling.
inline void transform(cdouble* a, std::size_t n, bool inverse) {
  if (n <= 1) return;
  const Tables& t = tables_for(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = t.rev[i];
    if (i < r) std::swap(a[i], a[r]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cdouble w = t.twiddle[j * stride];
        if (inverse) w = std::conj(w);
        const cdouble u = a[i + j];
        const cdouble v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= scale;
  }
}

}  // namespace detail

/// Forward real transform of n samples (n a power of two, n >= 4).
/// Returns the normalized half-spectrum c_k = (1/n) sum_j x_j e^{-i k u_j},
/// k = 0..n/2, so that x_j = sum_{|k|<=n/2} c_k e^{i k u_j} with c_{-k} =
/// conj(c_k). Uses the packed length-n/2 complex transform.
inline std::vector<cdouble> real_forward(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n) || n < 4)
    throw InvalidArgument("real_forward: size must be a power of two >= 4");
  const std::size_t m = n / 2;
  std::vector<cdouble> z(m);
  for (std::size_t k = 0; k < m; ++k) z[k] = cdouble(x[2 * k], x[2 * k + 1]);
  detail::transform(z.data(), m, false);

  const detail::Tables& t = detail::tables_for(n);
  std::vector<cdouble> c(m + 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k <= m; ++k) {
    const cdouble zk = (k == m) ? z[0] : z[k];
    const cdouble zmk = std::conj(k == 0 ? z[0] : z[m - k]);
    const cdouble e = 0.5 * (zk + zmk);
    const cdouble o = cdouble(0.0, -0.5) * (zk - zmk);
    const cdouble w = (k == m) ? cdouble(-1.0, 0.0) : t.twiddle[k];
    c[k] = (e + w * o) * inv_n;
  }
  c[0] = cdouble(c[0].real(), 0.0);
  c[m] = cdouble(c[m].real(), 0.0);
  return c;
}

/// Inverse of real_forward: reconstructs n real samples from the normalized
/// half-spectrum (size n/2 + 1). Imaginary parts of c_0 and c_{n/2} are
/// ignored.
inline std::vector<double> real_inverse(const std::vector<cdouble>& c,
                                        std::size_t n) {
  if (!is_power_of_two(n) || n < 4)
    throw InvalidArgument("real_inverse: size must be a power of two >= 4");
  const std::size_t m = n / 2;
  if (c.size() != m + 1)
    throw DimensionMismatch("real_inverse: spectrum size != n/2 + 1");

  const detail::Tables& t = detail::tables_for(n);
  const double scale = static_cast<double>(n);
  std::vector<cdouble> z(m);
  for (std::size_t k = 0; k < m; ++k) {
    cdouble sk = c[k] * scale;
    cdouble smk = std::conj(c[m - k]) * scale;
    if (k == 0) sk = cdouble(sk.real(), 0.0);
    if (k == 0) smk = cdouble(smk.real(), 0.0);
    const cdouble e = 0.5 * (sk + smk);
    // o = (sk - smk) / (2 w^k), with w^k from the cached forward table
    const cdouble w = t.twiddle[k];
    const cdouble o = 0.5 * (sk - smk) * std::conj(w);
    z[k] = e + cdouble(0.0, 1.0) * o;
  }
  detail::transform(z.data(), m, true);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < m; ++k) {
    x[2 * k] = z[k].real();
    x[2 * k + 1] = z[k].imag();
  }
  return x;
}

}  // namespace stokeswave::fft
