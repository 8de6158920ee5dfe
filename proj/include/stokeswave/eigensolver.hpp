#pragma once

// Eigenvalues of the stability pencil near a shift target, by Arnoldi
// iteration on C = (A - sigma B)^{-1} B with matrix-free inner solves.
// Operators are real; complex shifts run through the real 2x2 embedding of
// C^{2N} into R^{4N}. Near the origin the iteration is restricted to the
// invariant subspace cut out by the two linearized-constraint functionals,
// which removes the generalized kernel directions fed by the symmetries.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "stokeswave/krylov.hpp"
#include "stokeswave/pencil.hpp"
#include "stokeswave/smalldense.hpp"

namespace stokeswave {

struct EigenPair {
  std::complex<double> lambda;
  GridFunction v_re, v_im, w_re, w_im;
  double residual = 0.0;     // ||A x - lambda B x|| / ||x||, L2
  double constraint1 = 0.0;  // |<(1+2K eta), v>|
  double constraint2 = 0.0;  // |<eta', w> - 2c <K eta, v>|
};

struct SpectrumResult {
  std::complex<double> sigma;
  std::uint64_t seed = 0;
  std::size_t arnoldi_dim = 0;
  std::size_t requested = 0;
  std::vector<EigenPair> pairs;  // sorted by |lambda - sigma|
};

struct EigenOptions {
  std::size_t arnoldi_dim = 0;  // 0: max(40, 3k + 10)
  std::size_t max_dim = 240;
  double tol = 1e-8;            // pencil residual acceptance bound
  std::uint64_t seed = 20240901;
  double inner_rel_tol = 1e-12;
  std::size_t inner_max_iter = 800;
  bool deflate_constraints = true;
};

namespace detail {

using vec::Vec;

inline double lcg_uniform(std::uint64_t& state) {
  state = state * 6364136223846793005ULL + 1442695040888963407ULL;
  return 2.0 * (static_cast<double>(state >> 11) * 0x1.0p-53) - 1.0;
}

// raw [v; w] layout helpers on R^{2N}
inline PencilVector unpack(const Vec& x, std::size_t n) {
  return {GridFunction(std::vector<double>(x.begin(), x.begin() + static_cast<long>(n))),
          GridFunction(std::vector<double>(x.begin() + static_cast<long>(n), x.end()))};
}

inline Vec pack(const PencilVector& p) {
  Vec x(p.v.samples());
  x.insert(x.end(), p.w.samples().begin(), p.w.samples().end());
  return x;
}

/// Exact inverse of the flat-water shifted pencil A0 - sigma B0, which is
/// diagonal over signed Fourier modes with the 2x2 symbol
///   [ -sigma, |n| ; c^2 |n| - 1 + 2 i c sigma sgn(n), -sigma ].
/// Used as the preconditioner for the shift-and-invert inner solves: the
/// preconditioned operator is the identity plus wave-dependent compact
/// terms, so GMRES convergence is insensitive to the grid size.
class FlatShiftedInverse {
 public:
  FlatShiftedInverse(std::size_t n, double c, double sigma) : n_(n) {
    const std::size_t half = n / 2;
    inv_.resize(4 * (half + 1), cdouble(0.0));
    for (std::size_t k = 0; k <= half; ++k) {
      const double kk = static_cast<double>(k);
      const cdouble a(-sigma, 0.0);
      const cdouble b(kk, 0.0);
      const cdouble cc(kk == 0.0 ? -1.0 : c * c * kk - 1.0, k > 0 ? 2.0 * c * sigma : 0.0);
      const cdouble d(-sigma, 0.0);
      const cdouble det = a * d - b * cc;
      if (k == half || std::abs(det) == 0.0) continue;  // Nyquist stays zeroed
      inv_[4 * k + 0] = d / det;
      inv_[4 * k + 1] = -b / det;
      inv_[4 * k + 2] = -cc / det;
      inv_[4 * k + 3] = a / det;
    }
  }

  // x = [v samples; w samples] on R^{2N}
  Vec apply(const Vec& x) const {
    GridFunction v(std::vector<double>(x.begin(), x.begin() + static_cast<long>(n_)));
    GridFunction w(std::vector<double>(x.begin() + static_cast<long>(n_), x.end()));
    auto vh = v.spectrum();
    auto wh = w.spectrum();
    for (std::size_t k = 0; k < vh.size(); ++k) {
      const cdouble a = vh[k], b = wh[k];
      vh[k] = inv_[4 * k + 0] * a + inv_[4 * k + 1] * b;
      wh[k] = inv_[4 * k + 2] * a + inv_[4 * k + 3] * b;
    }
    Vec out = fft::real_inverse(vh, n_);
    Vec tail = fft::real_inverse(wh, n_);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  }

 private:
  std::size_t n_;
  std::vector<cdouble> inv_;  // 2x2 blocks per mode
};

/// Orthogonal projection onto the intersection of the kernels of the two
/// constraint functionals; the subspace is invariant under C because the
/// constraint vectors span the left kernel of A paired through B.
class ConstraintProjector {
 public:
  ConstraintProjector(const PencilOperators& ops) {
    const std::size_t n = ops.size();
    g_[0] = pack({ops.one_plus_2keta(), GridFunction(n)});
    g_[1] = pack({(-2.0 * ops.speed()) * ops.k_eta(), ops.eta_prime()});
    gram_[0] = vec::dot(g_[0], g_[0]);
    gram_[1] = vec::dot(g_[0], g_[1]);
    gram_[2] = gram_[1];
    gram_[3] = vec::dot(g_[1], g_[1]);
    det_ = gram_[0] * gram_[3] - gram_[1] * gram_[2];
  }

  void apply(Vec& x) const {
    if (det_ == 0.0) return;
    const std::size_t len = g_[0].size();
    for (std::size_t half = 0; half * len < x.size(); ++half) {
      double b0 = 0.0, b1 = 0.0;
      const std::size_t off = half * len;
      for (std::size_t i = 0; i < len; ++i) {
        b0 += g_[0][i] * x[off + i];
        b1 += g_[1][i] * x[off + i];
      }
      const double a0 = (gram_[3] * b0 - gram_[1] * b1) / det_;
      const double a1 = (gram_[0] * b1 - gram_[2] * b0) / det_;
      for (std::size_t i = 0; i < len; ++i)
        x[off + i] -= a0 * g_[0][i] + a1 * g_[1][i];
    }
  }

 private:
  Vec g_[2];
  double gram_[4] = {0, 0, 0, 0};
  double det_ = 0.0;
};

}  // namespace detail

/// k eigenvalues of B^{-1} A nearest sigma, with eigenfunction pairs and
/// constraint residuals. Each returned pair satisfies
/// ||A x - lambda B x|| <= tol * ||x||; the Arnoldi dimension grows until k
/// such pairs are found or max_dim is reached.
inline SpectrumResult eigen_near(const PencilOperators& ops, std::complex<double> sigma,
                                 std::size_t k, const EigenOptions& opt = {}) {
  using detail::Vec;
  if (k == 0) throw InvalidArgument("eigen_near: k must be positive");
  const std::size_t n = ops.size();
  const std::size_t block = 2 * n;
  const bool complex_shift = sigma.imag() != 0.0;
  const std::size_t len = complex_shift ? 2 * block : block;

  // block applications on the raw layout
  auto apply_A_raw = [&](const Vec& x) { return detail::pack(ops.apply_A(detail::unpack(x, n))); };
  auto apply_B_raw = [&](const Vec& x) { return detail::pack(ops.apply_B(detail::unpack(x, n))); };
  auto apply_T_real = [&](const Vec& x) {
    Vec ax = apply_A_raw(x);
    Vec bx = apply_B_raw(x);
    for (std::size_t i = 0; i < block; ++i) ax[i] -= sigma.real() * bx[i];
    return ax;
  };
  auto apply_T = [&](const Vec& x) {
    if (!complex_shift) return apply_T_real(x);
    // [A - sr B, si B; -si B, A - sr B] on stacked (re; im)
    Vec top(x.begin(), x.begin() + static_cast<long>(block));
    Vec bot(x.begin() + static_cast<long>(block), x.end());
    Vec t = apply_T_real(top);
    Vec b = apply_T_real(bot);
    Vec btop = apply_B_raw(top);
    Vec bbot = apply_B_raw(bot);
    Vec out(len);
    for (std::size_t i = 0; i < block; ++i) {
      out[i] = t[i] + sigma.imag() * bbot[i];
      out[block + i] = b[i] - sigma.imag() * btop[i];
    }
    return out;
  };
  // real shifts get the exact flat-water inverse; the complex embedding
  // falls back to the blockwise (1 + c^2 K)^{-1}
  const detail::FlatShiftedInverse flat_inv(n, ops.speed(),
                                            complex_shift ? 0.0 : sigma.real());
  auto precond = [&](const Vec& x) {
    if (!complex_shift) return flat_inv.apply(x);
    Vec out(x.size());
    const double c = ops.speed();
    for (std::size_t seg = 0; seg * n < x.size(); ++seg) {
      GridFunction g(std::vector<double>(x.begin() + static_cast<long>(seg * n),
                                         x.begin() + static_cast<long>((seg + 1) * n)));
      auto p = precondition_inverse(g, c).samples();
      std::copy(p.begin(), p.end(), out.begin() + static_cast<long>(seg * n));
    }
    return out;
  };
  auto apply_B_full = [&](const Vec& x) {
    if (!complex_shift) return apply_B_raw(x);
    Vec top(x.begin(), x.begin() + static_cast<long>(block));
    Vec bot(x.begin() + static_cast<long>(block), x.end());
    Vec bt = apply_B_raw(top);
    Vec bb = apply_B_raw(bot);
    bt.insert(bt.end(), bb.begin(), bb.end());
    return bt;
  };

  const detail::ConstraintProjector projector(ops);
  const bool deflate = opt.deflate_constraints;

  auto apply_C = [&](const Vec& x) {
    Vec bx = apply_B_full(x);
    Vec z(len, 0.0);
    KrylovOptions kopt;
    kopt.rel_tol = opt.inner_rel_tol;
    kopt.max_iter = opt.inner_max_iter;
    kopt.restart = 150;
    auto res = gmres(apply_T, precond, bx, z, kopt);
    if (!res.converged)
      throw InnerSolveFailure("eigen_near: shifted solve stagnated, residual " +
                              std::to_string(res.residual_norm));
    if (deflate) projector.apply(z);
    return z;
  };

  std::size_t dim = opt.arnoldi_dim ? opt.arnoldi_dim : std::max<std::size_t>(40, 3 * k + 10);
  dim = std::min(dim, opt.max_dim);

  SpectrumResult result;
  result.sigma = sigma;
  result.seed = opt.seed;
  result.requested = k;

  while (true) {
    // Arnoldi with modified Gram-Schmidt and one re-orthogonalization pass
    std::vector<Vec> basis;
    basis.reserve(dim + 1);
    {
      std::uint64_t st = opt.seed;
      Vec v0(len);
      for (auto& x : v0) x = detail::lcg_uniform(st);
      if (deflate) projector.apply(v0);
      const double nv = vec::norm(v0);
      if (nv == 0.0) throw ArnoldiBreakdown("eigen_near: start vector vanished");
      vec::scale(1.0 / nv, v0);
      basis.push_back(std::move(v0));
    }

    std::vector<double> h((dim + 1) * dim, 0.0);  // column-major (dim+1) x dim
    std::size_t m_eff = dim;
    for (std::size_t j = 0; j < dim; ++j) {
      Vec w = apply_C(basis[j]);
      double* hj = &h[j * (dim + 1)];
      for (std::size_t i = 0; i <= j; ++i) {
        hj[i] = vec::dot(w, basis[i]);
        vec::axpy(-hj[i], basis[i], w);
      }
      for (std::size_t i = 0; i <= j; ++i) {
        const double corr = vec::dot(w, basis[i]);
        hj[i] += corr;
        vec::axpy(-corr, basis[i], w);
      }
      const double hs = vec::norm(w);
      hj[j + 1] = hs;
      if (hs < 1e-13) {
        m_eff = j + 1;  // invariant subspace found
        break;
      }
      vec::scale(1.0 / hs, w);
      basis.push_back(std::move(w));
    }
    if (m_eff == 0) throw ArnoldiBreakdown("eigen_near: no Krylov space");

    // Ritz values of the square Hessenberg block, largest |mu| first
    std::vector<double> hm(m_eff * m_eff, 0.0);
    for (std::size_t j = 0; j < m_eff; ++j)
      for (std::size_t i = 0; i < m_eff; ++i)
        if (i <= j + 1) hm[i * m_eff + j] = h[j * (dim + 1) + i];
    auto ritz = smalldense::hessenberg_eigenvalues(hm, m_eff);
    std::sort(ritz.begin(), ritz.end(),
              [](const cdouble& a, const cdouble& b) { return std::abs(a) > std::abs(b); });

    result.pairs.clear();
    for (const auto& mu : ritz) {
      if (result.pairs.size() >= k) break;
      if (std::abs(mu) < 1e-14) continue;
      const std::complex<double> lambda = sigma + 1.0 / mu;

      bool dup = false;
      for (const auto& p : result.pairs)
        if (std::abs(p.lambda - lambda) <= 1e-9 * (1.0 + std::abs(lambda))) dup = true;
      if (dup) continue;

      auto y = smalldense::hessenberg_eigenvector(hm, m_eff, mu);
      // assemble the complex Ritz vector over the real basis
      Vec xr(len, 0.0), xi(len, 0.0);
      for (std::size_t j = 0; j < m_eff; ++j) {
        vec::axpy(y[j].real(), basis[j], xr);
        vec::axpy(y[j].imag(), basis[j], xi);
      }
      if (complex_shift) {
        // embedded vector (zeta_t; zeta_b) represents x = zeta_t with
        // zeta_b = -i zeta_t; recombine both estimates of x
        Vec xr2(block), xi2(block);
        for (std::size_t i = 0; i < block; ++i) {
          const double tr = xr[i], ti = xi[i];          // Re/Im of zeta_t
          const double br = xr[block + i], bi = xi[block + i];  // of zeta_b
          // x = (zeta_t + i zeta_b) / 2 averages the two copies
          xr2[i] = 0.5 * (tr - bi);
          xi2[i] = 0.5 * (ti + br);
        }
        xr = std::move(xr2);
        xi = std::move(xi2);
      }

      PencilVector pr = detail::unpack(xr, n);
      PencilVector pi = detail::unpack(xi, n);
      const double nrm = std::sqrt(inner(pr, pr) + inner(pi, pi));
      if (nrm < 1e-14) continue;
      pr = (1.0 / nrm) * pr;
      pi = (1.0 / nrm) * pi;

      // true pencil residual ||A x - lambda B x||
      PencilVector ar = ops.apply_A(pr), ai = ops.apply_A(pi);
      PencilVector br = ops.apply_B(pr), bi = ops.apply_B(pi);
      const double lr = lambda.real(), li = lambda.imag();
      PencilVector rr = ar - (lr * br - li * bi);
      PencilVector ri = ai - (lr * bi + li * br);
      const double res = std::sqrt(inner(rr, rr) + inner(ri, ri));
      if (res > opt.tol) continue;

      EigenPair pair{lambda, pr.v, pi.v, pr.w, pi.w, res, 0.0, 0.0};
      const auto c_re = ops.constraint_residuals(pr.v, pr.w);
      const auto c_im = ops.constraint_residuals(pi.v, pi.w);
      pair.constraint1 = std::hypot(c_re.first, c_im.first);
      pair.constraint2 = std::hypot(c_re.second, c_im.second);
      result.pairs.push_back(std::move(pair));
    }

    result.arnoldi_dim = m_eff;
    const bool can_grow = m_eff == dim && dim < opt.max_dim;
    if (result.pairs.size() >= k || !can_grow) break;
    dim = std::min(opt.max_dim, dim + dim / 2 + 10);
  }

  std::sort(result.pairs.begin(), result.pairs.end(),
            [&](const EigenPair& a, const EigenPair& b) {
              return std::abs(a.lambda - sigma) < std::abs(b.lambda - sigma);
            });
  if (result.pairs.size() > k)
    result.pairs.erase(result.pairs.begin() + static_cast<long>(k), result.pairs.end());
  return result;
}

}  // namespace stokeswave
