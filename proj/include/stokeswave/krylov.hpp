#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stokeswave/errors.hpp"

namespace stokeswave {

namespace vec {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, Vec& x) {
  for (auto& v : x) v *= alpha;
}

}  // namespace vec

struct KrylovOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  std::size_t max_iter = 500;
  std::size_t restart = 0;  // GMRES only; 0 means no restart
};

struct KrylovResult {
  std::size_t iterations = 0;
  double residual_norm = 0.0;  // true unpreconditioned residual on exit
  bool converged = false;
};

/// Preconditioned MINRES for a self-adjoint (possibly indefinite) operator
/// with a symmetric positive definite preconditioner. The iteration tracks
/// the residual in the preconditioner norm; the returned residual_norm is
/// the true L2 residual recomputed on exit.
template <class OpA, class OpM>
KrylovResult minres(OpA&& apply_A, OpM&& apply_M, const vec::Vec& b, vec::Vec& x,
                    const KrylovOptions& opt = {}) {
  using vec::Vec;
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);

  Vec v(n), v_old(n, 0.0), w(n, 0.0), w_old(n, 0.0);
  // r0 = b - A x
  {
    Vec ax = apply_A(x);
    v = b;
    vec::axpy(-1.0, ax, v);
  }
  Vec z = apply_M(v);
  double gamma_sq = vec::dot(z, v);
  if (gamma_sq < -1e-13 * vec::norm(z) * vec::norm(v))
    throw Error("minres: preconditioner is not positive definite");
  double gamma = std::sqrt(std::max(gamma_sq, 0.0));
  const double gamma0 = gamma;
  KrylovResult result;
  if (gamma == 0.0) {
    result.converged = true;
    result.residual_norm = 0.0;
    return result;
  }

  double gamma_old = 1.0, eta = gamma;
  double s_prev = 0.0, s_cur = 0.0, c_prev = 1.0, c_cur = 1.0;

  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    vec::scale(1.0 / gamma, z);
    Vec az = apply_A(z);
    const double delta = vec::dot(az, z);

    Vec v_new = az;
    vec::axpy(-delta / gamma, v, v_new);
    vec::axpy(-gamma / gamma_old, v_old, v_new);
    Vec z_new = apply_M(v_new);
    const double g2 = vec::dot(z_new, v_new);
    if (g2 < -1e-13 * vec::norm(z_new) * vec::norm(v_new))
      throw Error("minres: preconditioner is not positive definite");
    const double gamma_new = std::sqrt(std::max(g2, 0.0));

    const double a0 = c_cur * delta - c_prev * s_cur * gamma;
    const double a1 = std::sqrt(a0 * a0 + gamma_new * gamma_new);
    const double a2 = s_cur * delta + c_prev * c_cur * gamma;
    const double a3 = s_prev * gamma;
    if (a1 == 0.0) break;  // operator singular on remaining subspace

    c_prev = c_cur;
    s_prev = s_cur;
    c_cur = a0 / a1;
    s_cur = gamma_new / a1;

    Vec w_new = z;
    vec::axpy(-a3, w_old, w_new);
    vec::axpy(-a2, w, w_new);
    vec::scale(1.0 / a1, w_new);

    vec::axpy(c_cur * eta, w_new, x);
    eta = -s_cur * eta;

    v_old.swap(v);
    v.swap(v_new);
    w_old.swap(w);
    w.swap(w_new);
    z.swap(z_new);
    gamma_old = gamma;
    gamma = gamma_new;
    result.iterations = it;

    if (std::abs(eta) <= opt.rel_tol * gamma0 + opt.abs_tol || gamma == 0.0) {
      result.converged = true;
      break;
    }
  }

  Vec ax = apply_A(x);
  Vec r = b;
  vec::axpy(-1.0, ax, r);
  result.residual_norm = vec::norm(r);
  // the estimate |eta| is in the preconditioner norm; trust the true
  // residual for the final convergence verdict
  const double bnorm = vec::norm(b);
  if (result.residual_norm <= opt.rel_tol * bnorm + opt.abs_tol) result.converged = true;
  return result;
}

/// Right-preconditioned restarted GMRES with modified Gram-Schmidt and a
/// single re-orthogonalization pass. Convergence is monitored on the true
/// residual (right preconditioning leaves it unchanged).
template <class OpA, class OpM>
KrylovResult gmres(OpA&& apply_A, OpM&& apply_M, const vec::Vec& b, vec::Vec& x,
                   const KrylovOptions& opt = {}) {
  using vec::Vec;
  const std::size_t n = b.size();
  if (x.size() != n) x.assign(n, 0.0);
  const std::size_t m = opt.restart == 0 ? opt.max_iter : opt.restart;
  const double bnorm = vec::norm(b);
  const double target = opt.rel_tol * bnorm + opt.abs_tol;

  KrylovResult result;
  if (bnorm == 0.0) {
    x.assign(n, 0.0);
    result.converged = true;
    return result;
  }

  std::size_t total_it = 0;
  while (total_it < opt.max_iter) {
    Vec r = b;
    {
      Vec ax = apply_A(x);
      vec::axpy(-1.0, ax, r);
    }
    double beta = vec::norm(r);
    result.residual_norm = beta;
    if (beta <= target) {
      result.converged = true;
      return result;
    }

    std::vector<Vec> basis;
    basis.reserve(m + 1);
    vec::scale(1.0 / beta, r);
    basis.push_back(std::move(r));

    std::vector<double> h((m + 1) * m, 0.0);  // column-major (m+1) x m
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    g[0] = beta;

    std::size_t j = 0;
    for (; j < m && total_it < opt.max_iter; ++j, ++total_it) {
      Vec w = apply_A(apply_M(basis[j]));
      double* hj = &h[j * (m + 1)];
      for (std::size_t i = 0; i <= j; ++i) {
        hj[i] = vec::dot(w, basis[i]);
        vec::axpy(-hj[i], basis[i], w);
      }
      for (std::size_t i = 0; i <= j; ++i) {  // re-orthogonalize
        const double corr = vec::dot(w, basis[i]);
        hj[i] += corr;
        vec::axpy(-corr, basis[i], w);
      }
      hj[j + 1] = vec::norm(w);

      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * hj[i] + sn[i] * hj[i + 1];
        hj[i + 1] = -sn[i] * hj[i] + cs[i] * hj[i + 1];
        hj[i] = t;
      }
      const double hsub = hj[j + 1];  // untouched by the rotations above
      const double denom = std::hypot(hj[j], hsub);
      if (denom == 0.0) break;
      cs[j] = hj[j] / denom;
      sn[j] = hsub / denom;
      hj[j] = denom;
      hj[j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] *= cs[j];
      result.residual_norm = std::abs(g[j + 1]);

      if (result.residual_norm <= target || hsub == 0.0) {
        ++j;
        ++total_it;
        break;
      }
      vec::scale(1.0 / hsub, w);
      basis.push_back(std::move(w));
    }

    // back substitution for y, then x += M^{-1} (V y)
    std::vector<double> y(j, 0.0);
    for (std::size_t ii = j; ii-- > 0;) {
      double s = g[ii];
      for (std::size_t k = ii + 1; k < j; ++k) s -= h[k * (m + 1) + ii] * y[k];
      y[ii] = s / h[ii * (m + 1) + ii];
    }
    Vec vy(n, 0.0);
    for (std::size_t k = 0; k < j; ++k) vec::axpy(y[k], basis[k], vy);
    Vec mz = apply_M(vy);
    vec::axpy(1.0, mz, x);

    result.iterations = total_it;
    if (result.residual_norm <= target) {
      result.converged = true;
      return result;
    }
    if (j == 0) break;
  }

  // final true residual
  Vec ax = apply_A(x);
  Vec r = b;
  vec::axpy(-1.0, ax, r);
  result.residual_norm = vec::norm(r);
  result.converged = result.residual_norm <= target;
  return result;
}

inline auto identity_preconditioner() {
  return [](const vec::Vec& v) { return v; };
}

}  // namespace stokeswave
