#pragma once

// Matrix-free application of the co-periodic stability pencil
//   A x = lambda B x,  A = [0, K; L, 0],  B = [M, 0; -2cH, M*],
// where M = 1 + K eta + eta' H and M* = 1 + K eta - H(eta' .) are an
// adjoint pair. B is block-lower-triangular, so B^{-1} reduces to two
// scalar solves with M and M*.

#include <cmath>
#include <cstddef>
#include <utility>

#include "stokeswave/babenko.hpp"
#include "stokeswave/grid.hpp"
#include "stokeswave/krylov.hpp"

namespace stokeswave {

/// A stability perturbation (v, w): v perturbs the profile, w the surface
/// potential variable.
struct PencilVector {
  GridFunction v, w;
};

inline PencilVector operator+(const PencilVector& a, const PencilVector& b) {
  return {a.v + b.v, a.w + b.w};
}
inline PencilVector operator-(const PencilVector& a, const PencilVector& b) {
  return {a.v - b.v, a.w - b.w};
}
inline PencilVector operator*(double s, const PencilVector& a) {
  return {s * a.v, s * a.w};
}
inline double inner(const PencilVector& a, const PencilVector& b) {
  return inner(a.v, b.v) + inner(a.w, b.w);
}
inline double norm_l2(const PencilVector& a) { return std::sqrt(inner(a, a)); }

class PencilOperators {
 public:
  explicit PencilOperators(StokesWave wave)
      : wave_(std::move(wave)),
        L_(wave_.eta, wave_.c),
        keta_(k_op(wave_.eta)),
        eta_prime_(derivative(wave_.eta)),
        one_plus_2keta_(shift_by(2.0 * keta_, 1.0)),
        keta_fine_(detail::fine_samples(keta_.spectrum(), keta_.size())),
        eta_prime_fine_(detail::fine_samples(eta_prime_.spectrum(), eta_prime_.size())) {}

  const StokesWave& wave() const { return wave_; }
  std::size_t size() const { return wave_.eta.size(); }
  double speed() const { return wave_.c; }
  const GridFunction& eta_prime() const { return eta_prime_; }
  const GridFunction& k_eta() const { return keta_; }
  const GridFunction& one_plus_2keta() const { return one_plus_2keta_; }

  /// M v = (1 + K eta) v + eta' (H v)
  GridFunction apply_M(const GridFunction& f) const {
    check(f);
    const std::size_t n = size();
    auto fh = f.spectrum();
    std::vector<cdouble> hfh(fh.size());
    for (std::size_t k = 1; k < fh.size(); ++k) hfh[k] = cdouble(0.0, 1.0) * fh[k];
    hfh[0] = 0.0;
    hfh.back() = 0.0;
    const auto f_f = detail::fine_samples(fh, n);
    const auto hf_f = detail::fine_samples(hfh, n);
    std::vector<double> prod(2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j)
      prod[j] = keta_fine_[j] * f_f[j] + eta_prime_fine_[j] * hf_f[j];
    const auto ph = fft::real_forward(prod);
    std::vector<cdouble> out(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) out[k] = fh[k] + ph[k];
    out.back() = 0.0;
    return GridFunction::from_spectrum(out, n);
  }

  /// M* w = (1 + K eta) w - H(eta' w); the adjoint of M.
  GridFunction apply_M_star(const GridFunction& f) const {
    check(f);
    const std::size_t n = size();
    auto fh = f.spectrum();
    const auto f_f = detail::fine_samples(fh, n);
    std::vector<double> p1(2 * n), p2(2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j) {
      p1[j] = keta_fine_[j] * f_f[j];
      p2[j] = eta_prime_fine_[j] * f_f[j];
    }
    const auto p1h = fft::real_forward(p1);
    const auto p2h = fft::real_forward(p2);
    std::vector<cdouble> out(n / 2 + 1);
    out[0] = fh[0] + p1h[0];
    for (std::size_t k = 1; k <= n / 2; ++k)
      out[k] = fh[k] + p1h[k] - cdouble(0.0, 1.0) * p2h[k];
    out.back() = 0.0;
    return GridFunction::from_spectrum(out, n);
  }

  GridFunction apply_L(const GridFunction& f) const { return L_.apply(f); }
  const LinearizedBabenko& linearization() const { return L_; }

  PencilVector apply_A(const PencilVector& x) const {
    return {k_op(x.w), L_.apply(x.v)};
  }

  PencilVector apply_B(const PencilVector& x) const {
    return {apply_M(x.v), (-2.0 * wave_.c) * hilbert(x.v) + apply_M_star(x.w)};
  }

  /// Solves M f = rhs by GMRES with the identity preconditioner (M is a
  /// compact perturbation of the identity for smooth waves). abs_tol guards
  /// against amplifying a numerically-zero right-hand side into noise.
  GridFunction solve_M(const GridFunction& rhs, double rel_tol = 1e-12,
                       double abs_tol = 0.0, std::size_t max_iter = 400) const {
    return krylov_solve(rhs, rel_tol, abs_tol, max_iter, /*star=*/false);
  }

  GridFunction solve_M_star(const GridFunction& rhs, double rel_tol = 1e-12,
                            double abs_tol = 0.0, std::size_t max_iter = 400) const {
    return krylov_solve(rhs, rel_tol, abs_tol, max_iter, /*star=*/true);
  }

  /// B^{-1} by block substitution: M v = r1, then M* w = r2 + 2c H v.
  /// Both sub-solves are tolerated relative to the block input scale.
  PencilVector apply_B_inverse(const PencilVector& r, double rel_tol = 1e-12) const {
    const double scale = std::max(norm_l2(r.v), norm_l2(r.w));
    const double abs_tol =
        rel_tol * scale * std::sqrt(static_cast<double>(size()));  // raw-norm units
    GridFunction v = solve_M(r.v, rel_tol, abs_tol);
    GridFunction rhs_w = r.w + (2.0 * wave_.c) * hilbert(v);
    GridFunction w = solve_M_star(rhs_w, rel_tol, abs_tol);
    return {std::move(v), std::move(w)};
  }

  /// The two Fredholm pairings every lambda != 0 eigenfunction satisfies:
  /// <(1+2K eta), v> and <eta', w> - 2c <K eta, v>.
  std::pair<double, double> constraint_residuals(const GridFunction& v,
                                                 const GridFunction& w) const {
    const double c1 = inner(one_plus_2keta_, v);
    const double c2 = inner(eta_prime_, w) - 2.0 * wave_.c * inner(keta_, v);
    return {c1, c2};
  }

 private:
  void check(const GridFunction& f) const {
    if (f.size() != size()) throw DimensionMismatch("PencilOperators: size mismatch");
  }

  GridFunction krylov_solve(const GridFunction& rhs, double rel_tol, double abs_tol,
                            std::size_t max_iter, bool star) const {
    auto apply = [this, star](const vec::Vec& x) {
      GridFunction g(x);
      return (star ? apply_M_star(g) : apply_M(g)).samples();
    };
    vec::Vec x(size(), 0.0);
    KrylovOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    opt.max_iter = max_iter;
    opt.restart = 150;
    auto res = gmres(apply, identity_preconditioner(), rhs.samples(), x, opt);
    if (!res.converged)
      throw IterationFailure(star ? "M* solve did not converge" : "M solve did not converge");
    return GridFunction(std::move(x));
  }

  StokesWave wave_;
  LinearizedBabenko L_;
  GridFunction keta_, eta_prime_, one_plus_2keta_;
  std::vector<double> keta_fine_, eta_prime_fine_;
};

}  // namespace stokeswave
