#pragma once

// Solving the traveling-wave equation (c^2 K - 1) eta = K(eta^2)/2 + eta K eta
// in conformal variables: residual evaluation, the self-adjoint linearization,
// Newton iteration with preconditioned MINRES inner solves (fixed speed) or a
// bordered GMRES solve (fixed steepness), and the branch derivative d eta/dc.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <utility>
#include <vector>

#include "stokeswave/grid.hpp"
#include "stokeswave/krylov.hpp"

namespace stokeswave {

/// Converged traveling-wave profile. eta is even with its crest at u = 0;
/// units have g = 1 and period 2*pi.
struct StokesWave {
  GridFunction eta;
  double c = 0.0;              // wave speed
  double s = 0.0;              // steepness (crest-to-trough height) / (2*pi)
  double residual_norm = 0.0;  // L2 norm of the equation residual
  std::size_t n_modes() const { return eta.size(); }
};

inline double steepness_of(const GridFunction& eta) {
  return (eta.value_at_zero() - eta.value_at_pi()) / two_pi;
}

namespace detail {

// padded spectra -> fine-grid samples for alias-free quadratic products
inline std::vector<double> fine_samples(const std::vector<cdouble>& half_spec,
                                        std::size_t n) {
  std::vector<cdouble> pad(n + 1, cdouble(0.0));
  for (std::size_t k = 0; k + 1 < half_spec.size(); ++k) pad[k] = half_spec[k];
  pad[half_spec.size() - 1] = 0.5 * half_spec.back().real();
  return fft::real_inverse(pad, 2 * n);
}

}  // namespace detail

/// Residual of the Babenko equation: S = (c^2 K - 1) eta - K(eta^2)/2
/// - eta * K eta, quadratic products de-aliased on a doubled grid.
inline GridFunction babenko_residual(const GridFunction& eta, double c) {
  const std::size_t n = eta.size();
  const auto eh = eta.spectrum();
  std::vector<cdouble> keh(eh.size());
  for (std::size_t k = 0; k < eh.size(); ++k) keh[k] = static_cast<double>(k) * eh[k];
  keh.back() = 0.0;

  const auto eta_f = detail::fine_samples(eh, n);
  const auto keta_f = detail::fine_samples(keh, n);
  const std::size_t m = 2 * n;
  std::vector<double> sq(m), cross(m);
  for (std::size_t j = 0; j < m; ++j) {
    sq[j] = eta_f[j] * eta_f[j];
    cross[j] = eta_f[j] * keta_f[j];
  }
  const auto sqh = fft::real_forward(sq);
  const auto crossh = fft::real_forward(cross);

  std::vector<cdouble> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double kk = static_cast<double>(k);
    out[k] = (c * c * kk - 1.0) * eh[k] - 0.5 * kk * sqh[k] - crossh[k];
  }
  out.back() = 0.0;
  return GridFunction::from_spectrum(out, n);
}

/// The linearization L = c^2 K - (1 + K eta) - eta K - K(eta .) of the
/// Babenko equation at (eta, c). Self-adjoint; Ker L = span(eta') away from
/// fold points. The profile fields are cached on the doubled grid so one
/// apply costs six transforms.
class LinearizedBabenko {
 public:
  LinearizedBabenko(const GridFunction& eta, double c)
      : n_(eta.size()),
        c_(c),
        eta_fine_(detail::fine_samples(eta.spectrum(), eta.size())),
        keta_fine_(2 * eta.size()) {
    auto eh = eta.spectrum();
    for (std::size_t k = 0; k < eh.size(); ++k) eh[k] *= static_cast<double>(k);
    eh.back() = 0.0;
    keta_fine_ = detail::fine_samples(eh, n_);
  }

  std::size_t size() const { return n_; }
  double speed() const { return c_; }

  GridFunction apply(const GridFunction& v) const {
    if (v.size() != n_) throw DimensionMismatch("LinearizedBabenko: size mismatch");
    const auto vh = v.spectrum();
    std::vector<cdouble> kvh(vh.size());
    for (std::size_t k = 0; k < vh.size(); ++k) kvh[k] = static_cast<double>(k) * vh[k];
    kvh.back() = 0.0;

    const auto v_f = detail::fine_samples(vh, n_);
    const auto kv_f = detail::fine_samples(kvh, n_);
    const std::size_t m = 2 * n_;
    std::vector<double> p(m), q(m);
    for (std::size_t j = 0; j < m; ++j) {
      p[j] = eta_fine_[j] * v_f[j];
      q[j] = keta_fine_[j] * v_f[j] + eta_fine_[j] * kv_f[j];
    }
    const auto ph = fft::real_forward(p);
    const auto qh = fft::real_forward(q);

    std::vector<cdouble> out(n_ / 2 + 1);
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      const double kk = static_cast<double>(k);
      out[k] = (c_ * c_ * kk - 1.0) * vh[k] - qh[k] - kk * ph[k];
    }
    out.back() = 0.0;
    return GridFunction::from_spectrum(out, n_);
  }

 private:
  std::size_t n_;
  double c_;
  std::vector<double> eta_fine_;   // 2N samples of eta
  std::vector<double> keta_fine_;  // 2N samples of K eta
};

/// Convenience one-shot application of L at (eta, c).
inline GridFunction linearized_apply(const GridFunction& eta, double c,
                                     const GridFunction& v) {
  return LinearizedBabenko(eta, c).apply(v);
}

/// (1 + c^2 K)^{-1}: the strictly positive preconditioner used for every
/// MINRES solve with L.
inline GridFunction precondition_inverse(const GridFunction& f, double c) {
  auto ch = f.spectrum();
  for (std::size_t k = 0; k < ch.size(); ++k)
    ch[k] /= 1.0 + c * c * static_cast<double>(k);
  ch.back() = 0.0;
  return GridFunction::from_spectrum(ch, f.size());
}

struct LinearSolveInfo {
  std::size_t iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  double removed_kernel_component = 0.0;
};

/// Solves L x = rhs by preconditioned MINRES, deflating the translational
/// kernel direction eta'. The kernel component of the right-hand side is
/// removed and reported; the solution satisfies <eta', x> = 0.
inline GridFunction solve_linearized(const LinearizedBabenko& L,
                                     const GridFunction& eta_prime,
                                     const GridFunction& rhs,
                                     const KrylovOptions& opt,
                                     LinearSolveInfo* info = nullptr) {
  const std::size_t n = L.size();
  const double kernel_sq = inner(eta_prime, eta_prime);
  const bool deflate = kernel_sq > 0.0;

  auto project = [&](const GridFunction& f) {
    if (!deflate) return f;
    const double a = inner(eta_prime, f) / kernel_sq;
    return f - a * eta_prime;
  };

  GridFunction b = project(rhs);
  const double removed = deflate ? std::abs(inner(eta_prime, rhs)) / std::sqrt(kernel_sq) : 0.0;

  auto apply_A = [&](const vec::Vec& x) {
    GridFunction gx = project(GridFunction(x));
    return project(L.apply(gx)).samples();
  };
  auto apply_M = [&](const vec::Vec& x) {
    GridFunction gx = project(GridFunction(x));
    return project(precondition_inverse(gx, L.speed())).samples();
  };

  vec::Vec x(n, 0.0);
  auto res = minres(apply_A, apply_M, b.samples(), x, opt);
  if (info) {
    info->iterations = res.iterations;
    // report in L2 units (raw vector norms carry a sqrt(N) factor)
    info->residual_norm = res.residual_norm / std::sqrt(static_cast<double>(n));
    info->converged = res.converged;
    info->removed_kernel_component = removed;
  }
  return project(GridFunction(std::move(x)));
}

struct NewtonOptions {
  double tol = 1e-13;           // absolute L2 residual target
  int max_iter = 60;
  double inner_rel_tol = 1e-3;  // inexact-Newton inner tolerance
  std::size_t inner_max_iter = 500;
  bool trace = false;           // per-iteration diagnostics on stderr
};

/// Double-precision evaluation floor of the residual norm: the c^2 K term
/// amplifies one-ulp sample noise by up to N/2, so no iteration can push
/// the L2 residual below roughly eps * N * ||eta||. The effective Newton
/// tolerance is the maximum of the requested one and this floor.
inline double residual_floor(std::size_t n, const GridFunction& eta, double c) {
  return 1.5e-16 * static_cast<double>(n) * std::max(1.0, c * c) *
         std::max(0.5, norm_inf(eta));
}

/// Newton iteration at fixed speed c: each step solves L(eta) delta = -S by
/// MINRES preconditioned with (1 + c^2 K), then re-projects onto the even
/// subspace. Throws SingularJacobian when the inner solve stagnates (fold
/// proximity in speed continuation) and NonConvergence past max_iter.
inline StokesWave newton_solve(const GridFunction& eta0, double c,
                               const NewtonOptions& opt = {}) {
  GridFunction eta = project_even(eta0);
  double r0 = -1.0;
  double best_r = 1e300;
  int stalled = 0;
  for (int it = 0; it <= opt.max_iter; ++it) {
    GridFunction S = babenko_residual(eta, c);
    double r = norm_l2(S);
    if (it == 0) r0 = r;
    if (opt.trace)
      std::fprintf(stderr, "  [newton %2d] N=%zu |S|=%.3e\n", it, eta.size(), r);
    if (r <= std::max(opt.tol, residual_floor(eta.size(), eta, c))) {
      const double s_now = steepness_of(eta);
      return StokesWave{std::move(eta), c, s_now, r};
    }
    if (!std::isfinite(r) || r > 1e6 * (r0 + 1.0))
      throw NonConvergence("newton_solve: residual diverged", r, it);
    if (r > 0.95 * best_r) {
      if (++stalled >= 6)
        throw NonConvergence("newton_solve: stalled at the residual floor", r, it);
    } else {
      stalled = 0;
      best_r = r;
    }

    LinearizedBabenko L(eta, c);
    GridFunction eta_prime = derivative(eta);
    KrylovOptions kopt;
    kopt.rel_tol = opt.inner_rel_tol;
    kopt.max_iter = opt.inner_max_iter;
    LinearSolveInfo info;
    GridFunction delta = solve_linearized(L, eta_prime, -1.0 * S, kopt, &info);
    if (!info.converged && info.residual_norm > 0.5 * r)
      throw SingularJacobian("newton_solve: MINRES stagnated, residual " +
                             std::to_string(info.residual_norm));

    // damped update: halve the step while the residual worsens, fall back
    // to the full step if no damping helps
    GridFunction full = project_even(eta + delta);
    double step = 1.0;
    bool accepted = false;
    for (int back = 0; back < 5 && !accepted; ++back) {
      GridFunction trial = step == 1.0 ? full : project_even(eta + step * delta);
      if (norm_l2(babenko_residual(trial, c)) < r) {
        eta = std::move(trial);
        accepted = true;
      }
      step *= 0.5;
    }
    if (!accepted) eta = std::move(full);
  }
  throw NonConvergence("newton_solve: no convergence",
                       norm_l2(babenko_residual(eta, c)), opt.max_iter);
}

/// A linear scalar constraint g(eta, c) = ell(eta) + row_c * c - target
/// closing the bordered system when c joins the unknowns.
struct LinearConstraint {
  std::function<double(const GridFunction&)> ell;
  double row_c = 0.0;
  double target = 0.0;
  double operator()(const GridFunction& eta, double c) const {
    return ell(eta) + row_c * c - target;
  }
};

/// Newton iteration on the extended unknown (eta, c) closed by a linear
/// scalar constraint. The bordered Jacobian [L, 2cK eta; ell, row_c] is
/// nonsymmetric but stays invertible through fold points of c(s); each step
/// is solved by GMRES preconditioned blockwise with (1 + c^2 K)^{-1}.
inline StokesWave newton_solve_bordered(const GridFunction& eta0, double c0,
                                        const LinearConstraint& constraint,
                                        const NewtonOptions& opt = {}) {
  const std::size_t n = eta0.size();
  GridFunction eta = project_even(eta0);
  double c = c0;
  double best_r = 1e300;
  int stalled = 0;

  for (int it = 0; it <= opt.max_iter; ++it) {
    GridFunction S = babenko_residual(eta, c);
    const double g = constraint(eta, c);
    const double r = std::sqrt(inner(S, S) + g * g);
    if (opt.trace)
      std::fprintf(stderr, "  [bordered %2d] N=%zu c=%.12f |S|=%.3e |g|=%.3e\n", it,
                   n, c, norm_l2(S), std::abs(g));
    if (r <= std::max(opt.tol, residual_floor(n, eta, c))) {
      const double s_now = steepness_of(eta);
      return StokesWave{std::move(eta), c, s_now, norm_l2(S)};
    }
    if (!std::isfinite(r)) throw NonConvergence("bordered solve: diverged", r, it);
    if (r > 0.95 * best_r) {
      if (++stalled >= 6)
        throw NonConvergence("bordered solve: stalled at the residual floor", r, it);
    } else {
      stalled = 0;
      best_r = r;
    }

    LinearizedBabenko L(eta, c);
    GridFunction dSdc = (2.0 * c) * k_op(eta);

    // extended vector layout: [delta eta samples..., delta c]
    auto apply_J = [&](const vec::Vec& x) {
      GridFunction de(std::vector<double>(x.begin(), x.end() - 1));
      const double dc = x.back();
      GridFunction top = L.apply(de) + dc * dSdc;
      vec::Vec out = top.samples();
      out.push_back(constraint.ell(de) + constraint.row_c * dc);
      return out;
    };
    auto apply_P = [&](const vec::Vec& x) {
      GridFunction de(std::vector<double>(x.begin(), x.end() - 1));
      vec::Vec out = precondition_inverse(de, c).samples();
      out.push_back(x.back());
      return out;
    };

    vec::Vec rhs = (-1.0 * S).samples();
    rhs.push_back(-g);
    vec::Vec dx(n + 1, 0.0);
    KrylovOptions kopt;
    kopt.rel_tol = opt.inner_rel_tol;
    kopt.max_iter = opt.inner_max_iter;
    auto res = gmres(apply_J, apply_P, rhs, dx, kopt);
    if (!res.converged && res.residual_norm > 0.5 * r)
      throw SingularJacobian("bordered solve: GMRES stagnated");

    GridFunction delta(std::vector<double>(dx.begin(), dx.end() - 1));
    const double dc = dx.back();
    double step = 1.0;
    bool accepted = false;
    for (int back = 0; back < 5 && !accepted; ++back) {
      GridFunction trial_eta = project_even(eta + step * delta);
      const double trial_c = c + step * dc;
      GridFunction ts = babenko_residual(trial_eta, trial_c);
      const double tg = constraint(trial_eta, trial_c);
      if (std::sqrt(inner(ts, ts) + tg * tg) < r) {
        eta = std::move(trial_eta);
        c = trial_c;
        accepted = true;
      }
      step *= 0.5;
    }
    if (!accepted) {
      eta = project_even(eta + delta);
      c += dc;
    }
  }
  throw NonConvergence("bordered solve: no convergence",
                       norm_l2(babenko_residual(eta, c)), opt.max_iter);
}

/// Newton iteration at fixed steepness: unknown (eta, c) with the constraint
/// eta(0) - eta(pi) = 2*pi*s, which parameterizes the branch through folds.
inline StokesWave newton_solve_steepness(const GridFunction& eta0, double c0,
                                         double s_target,
                                         const NewtonOptions& opt = {}) {
  LinearConstraint steep{
      [](const GridFunction& e) { return e.value_at_zero() - e.value_at_pi(); },
      0.0, two_pi * s_target};
  return newton_solve_bordered(eta0, c0, steep, opt);
}

/// d eta / dc = -2c L^{-1} K eta on the even subspace, away from folds.
/// Throws FoldPoint when the solve stagnates.
inline GridFunction d_eta_dc(const StokesWave& wave, double residual_tol = 1e-10) {
  GridFunction rhs = (-2.0 * wave.c) * k_op(wave.eta);
  if (norm_l2(rhs) == 0.0) return GridFunction(wave.eta.size());

  LinearizedBabenko L(wave.eta, wave.c);
  GridFunction eta_prime = derivative(wave.eta);
  KrylovOptions opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 0.1 * residual_tol;
  opt.max_iter = 2000;
  LinearSolveInfo info;
  GridFunction x = solve_linearized(L, eta_prime, rhs, opt, &info);
  if (info.residual_norm > residual_tol * std::max(1.0, norm_l2(rhs)))
    throw FoldPoint("d_eta_dc: even-subspace solve stagnated, residual " +
                    std::to_string(info.residual_norm));
  return project_even(x);
}

// --- small-amplitude expansion of the wave family ---

/// Third-order profile eta = a cos u + a^2 (cos 2u - 1/2) + (3/2) a^3 cos 3u.
inline GridFunction small_amplitude_eta(std::size_t n, double a) {
  return GridFunction::sample(n, [a](double u) {
    return a * std::cos(u) + a * a * (std::cos(2 * u) - 0.5) +
           1.5 * a * a * a * std::cos(3 * u);
  });
}

/// Speed along the small-amplitude family: c^2 = 1 + a^2.
inline double small_amplitude_speed(double a) { return std::sqrt(1.0 + a * a); }

/// Steepness of the third-order profile: 2*pi*s = 2a + 3a^3.
inline double small_amplitude_steepness(double a) {
  return (2.0 * a + 3.0 * a * a * a) / two_pi;
}

/// Inverts s -> a for the third-order family (Newton on the cubic).
inline double amplitude_for_steepness(double s) {
  double a = pi * s;
  for (int i = 0; i < 50; ++i) {
    const double f = 2.0 * a + 3.0 * a * a * a - two_pi * s;
    const double fp = 2.0 + 9.0 * a * a;
    const double step = f / fp;
    a -= step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(a))) break;
  }
  return a;
}

}  // namespace stokeswave
