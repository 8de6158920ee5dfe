#pragma once

// Conserved functionals of the water-wave system evaluated in the conformal
// frame, their branch restrictions, and finite-difference analysis of the
// branch: derivative estimates in s with chain-rule conversion to c, and
// location of momentum/energy extrema.
//
// Convention: every functional is a contour integral, \oint f du =
// 2*pi*<1,f> with the normalized inner product. Quantities written with
// plain inner products (the solvability constant D(c), the normal-form
// ingredients) use the normalized convention; conversions go through
// `functional_scale`.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "stokeswave/babenko.hpp"
#include "stokeswave/branch.hpp"
#include "stokeswave/grid.hpp"
#include "stokeswave/smalldense.hpp"

namespace stokeswave {

inline constexpr double functional_scale = two_pi;  // \oint du / <1,.>

/// Mass, horizontal momentum, vertical momentum, energy.
struct ConservedSet {
  double M = 0.0;
  double P = 0.0;
  double Q = 0.0;
  double H = 0.0;
};

/// Evaluates the four conserved integrals on a general (psi, eta) pair:
///   M = \oint eta (1 + K eta) du,   P = -\oint psi eta_u du,
///   Q = \oint psi (1 + K eta) du,   H = (1/2) \oint (psi K psi
///       + eta^2 (1 + K eta)) du.
inline ConservedSet conserved_eval(const GridFunction& psi, const GridFunction& eta) {
  detail::check_same_size(psi, eta);
  const GridFunction keta = k_op(eta);
  const GridFunction eta_u = derivative(eta);
  const GridFunction eta_sq = multiply(eta, eta);

  ConservedSet out;
  out.M = functional_scale * (mean(eta) + inner(eta, keta));
  out.P = -functional_scale * inner(psi, eta_u);
  out.Q = functional_scale * (mean(psi) + inner(psi, keta));
  out.H = 0.5 * functional_scale *
          (inner(psi, k_op(psi)) + inner(eta, eta) + inner(eta_sq, keta));
  return out;
}

/// Surface potential of a traveling wave, psi = -c H eta.
inline GridFunction traveling_psi(const StokesWave& w) {
  return (-w.c) * hilbert(w.eta);
}

// --- branch restrictions; see wave-momentum / wave-energy / action forms ---

/// P(c) = c <K eta, eta> in the normalized convention.
inline double wave_momentum_inner(const StokesWave& w) {
  return w.c * inner(k_op(w.eta), w.eta);
}

inline double wave_momentum(const StokesWave& w) {
  return functional_scale * wave_momentum_inner(w);
}

inline double wave_energy(const StokesWave& w) {
  const GridFunction keta = k_op(w.eta);
  const GridFunction eta_sq = multiply(w.eta, w.eta);
  const double kinetic = 0.5 * w.c * w.c * inner(keta, w.eta);
  const double potential = 0.5 * (inner(w.eta, w.eta) + inner(eta_sq, keta));
  return functional_scale * (kinetic + potential);
}

inline double wave_action(const StokesWave& w) {
  const GridFunction keta = k_op(w.eta);
  const GridFunction eta_sq = multiply(w.eta, w.eta);
  const double quad = 0.5 * (w.c * w.c * inner(keta, w.eta) - inner(w.eta, w.eta));
  const double cubic = 0.5 * inner(k_op(eta_sq), w.eta);
  return functional_scale * (quad - cubic);
}

/// Branch summary row for one converged wave.
inline BranchPoint branch_point_of(const StokesWave& w) {
  BranchPoint p;
  p.s = w.s;
  p.c = w.c;
  p.H = wave_energy(w);
  p.P = wave_momentum(w);
  p.E = wave_action(w);
  p.m_residual = std::abs(functional_scale * (mean(w.eta) + inner(w.eta, k_op(w.eta))));
  p.n = w.n_modes();
  return p;
}

namespace detail {

/// Fornberg weights: c[j] = weight of f(x_j) in the approximation of the
/// m-th derivative at z. Handles arbitrary (non-uniform) nodes.
inline std::vector<double> fd_weights(double z, const std::vector<double>& x,
                                      std::size_t m) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

/// Least-squares cubic fit p(t) = a0 + a1 t + a2 t^2 + a3 t^3 through
/// (t_i, y_i); returns the coefficients.
inline std::array<double, 4> cubic_fit(const std::vector<double>& t,
                                       const std::vector<double>& y) {
  std::vector<double> ata(16, 0.0), atb(4, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    double pw[4] = {1.0, t[i], t[i] * t[i], t[i] * t[i] * t[i]};
    for (int r = 0; r < 4; ++r) {
      atb[static_cast<std::size_t>(r)] += pw[r] * y[i];
      for (int col = 0; col < 4; ++col) ata[static_cast<std::size_t>(r * 4 + col)] += pw[r] * pw[col];
    }
  }
  auto sol = smalldense::solve_real(ata, atb, 4);
  return {sol[0], sol[1], sol[2], sol[3]};
}

}  // namespace detail

/// Finite-difference derivative estimates at one interior branch point.
/// Derivatives are taken in s (the branch parameter that stays monotone)
/// and converted to c by the chain rule away from folds.
struct BranchDerivatives {
  double dP_ds = 0.0;
  double dc_ds = 0.0;
  double d2P_ds2 = 0.0;
  double d2c_ds2 = 0.0;
  double P_prime_c = 0.0;       // dP/dc (stored-column convention)
  double P_doubleprime_c = 0.0; // d2P/dc2
  bool near_fold = false;       // |dc_ds| below threshold; c-derivatives unset
};

inline constexpr double fold_slope_threshold = 1e-6;

/// Five-point stencil at branch index `index`; needs two neighbors on each
/// side. Throws BoundaryPoint otherwise.
inline BranchDerivatives branch_derivatives(const Branch& branch, std::size_t index) {
  const auto& pts = branch.points;
  if (index < 2 || index + 2 >= pts.size())
    throw BoundaryPoint("branch_derivatives: need two neighbors on each side");

  std::vector<double> s(5), P(5), cc(5);
  for (std::size_t k = 0; k < 5; ++k) {
    const auto& p = pts[index - 2 + k];
    s[k] = p.s;
    P[k] = p.P;
    cc[k] = p.c;
  }
  const auto w1 = detail::fd_weights(s[2], s, 1);
  const auto w2 = detail::fd_weights(s[2], s, 2);

  BranchDerivatives d;
  for (std::size_t k = 0; k < 5; ++k) {
    d.dP_ds += w1[k] * P[k];
    d.dc_ds += w1[k] * cc[k];
    d.d2P_ds2 += w2[k] * P[k];
    d.d2c_ds2 += w2[k] * cc[k];
  }
  if (std::abs(d.dc_ds) <= fold_slope_threshold) {
    d.near_fold = true;
    return d;
  }
  d.P_prime_c = d.dP_ds / d.dc_ds;
  d.P_doubleprime_c =
      (d.d2P_ds2 * d.dc_ds - d.dP_ds * d.d2c_ds2) / (d.dc_ds * d.dc_ds * d.dc_ds);
  return d;
}

/// A located extremum of the wave momentum along the branch. d2P_dc2 is in
/// the stored-column (contour-integral) convention.
struct MomentumExtremum {
  double s_star = 0.0;
  double c_star = 0.0;
  double P = 0.0;
  double H = 0.0;
  double d2P_dc2 = 0.0;
};

/// Scans dP/ds for sign changes, refines each by a local cubic fit over five
/// points, and excludes fold points (|dc/ds| below threshold; those indices
/// are reported through `flagged_folds` when given). Near the branch ends
/// the scan falls back to one-sided five-point stencils so extrema close to
/// the last computed point are still caught.
inline std::vector<MomentumExtremum> find_momentum_extrema(
    const Branch& branch, std::vector<std::size_t>* flagged_folds = nullptr) {
  std::vector<MomentumExtremum> out;
  const auto& pts = branch.points;
  if (pts.size() < 6) return out;

  std::vector<double> dP(pts.size(), 0.0), dc(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t left = std::min(i >= 2 ? i - 2 : 0, pts.size() - 5);
    std::vector<double> s(5);
    for (std::size_t k = 0; k < 5; ++k) s[k] = pts[left + k].s;
    const auto w1 = detail::fd_weights(pts[i].s, s, 1);
    for (std::size_t k = 0; k < 5; ++k) {
      dP[i] += w1[k] * pts[left + k].P;
      dc[i] += w1[k] * pts[left + k].c;
    }
  }

  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (!(dP[i] == 0.0 || dP[i] * dP[i + 1] < 0.0)) continue;

    if (std::abs(dc[i]) <= fold_slope_threshold ||
        std::abs(dc[i + 1]) <= fold_slope_threshold) {
      if (flagged_folds) flagged_folds->push_back(i);
      continue;
    }

    // centered, scaled cubic fits of P(s), c(s), H(s) over five points
    const std::size_t left = std::min(i >= 2 ? i - 2 : 0, pts.size() - 5);
    std::vector<double> t(5), Py(5), cy(5), Hy(5);
    const double s0 = pts[left + 2].s;
    double h = 0.0;
    for (std::size_t k = 0; k < 5; ++k) h = std::max(h, std::abs(pts[left + k].s - s0));
    for (std::size_t k = 0; k < 5; ++k) {
      t[k] = (pts[left + k].s - s0) / h;
      Py[k] = pts[left + k].P;
      cy[k] = pts[left + k].c;
      Hy[k] = pts[left + k].H;
    }
    const auto pc = detail::cubic_fit(t, Py);
    const auto ccf = detail::cubic_fit(t, cy);
    const auto hcf = detail::cubic_fit(t, Hy);

    // root of p'(t) = a1 + 2 a2 t + 3 a3 t^2 inside the bracket
    const double ta = (pts[i].s - s0) / h, tb = (pts[i + 1].s - s0) / h;
    double t_star = 0.5 * (ta + tb);
    for (int it = 0; it < 60; ++it) {
      const double f = pc[1] + 2.0 * pc[2] * t_star + 3.0 * pc[3] * t_star * t_star;
      const double fp = 2.0 * pc[2] + 6.0 * pc[3] * t_star;
      if (fp == 0.0) break;
      const double step = f / fp;
      t_star -= step;
      if (std::abs(step) < 1e-15) break;
    }
    if (!(t_star >= std::min(ta, tb) - 0.5 && t_star <= std::max(ta, tb) + 0.5)) continue;

    auto eval = [&](const std::array<double, 4>& a, double tt) {
      return a[0] + a[1] * tt + a[2] * tt * tt + a[3] * tt * tt * tt;
    };
    auto d1 = [&](const std::array<double, 4>& a, double tt) {
      return (a[1] + 2.0 * a[2] * tt + 3.0 * a[3] * tt * tt) / h;
    };
    auto d2 = [&](const std::array<double, 4>& a, double tt) {
      return (2.0 * a[2] + 6.0 * a[3] * tt) / (h * h);
    };

    MomentumExtremum ex;
    ex.s_star = s0 + h * t_star;
    ex.c_star = eval(ccf, t_star);
    ex.P = eval(pc, t_star);
    ex.H = eval(hcf, t_star);
    const double Ps = d1(pc, t_star), Pss = d2(pc, t_star);
    const double cs = d1(ccf, t_star), css = d2(ccf, t_star);
    ex.d2P_dc2 = (Pss * cs - Ps * css) / (cs * cs * cs);
    out.push_back(ex);
  }
  return out;
}

}  // namespace stokeswave
