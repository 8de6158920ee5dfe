#pragma once

// The Jordan chain of the zero eigenvalue at a momentum extremum: the
// kernel vector eta' (normalization a1 = 1, a2 = 0), the generalized pairs
// (v1, w1), (v2~, w2~), (v3~, w3~), the solvability constant D(c) = P'(c),
// the constant alpha, and the normal-form coefficient
// B = <eta', w3~> - 2c <K eta, v3~>, whose sign against P''(c0) decides
// whether the split eigenvalue pair is real or imaginary.
//
// All inner products here use the normalized convention <f,g> =
// (1/2pi) \oint f g du; conversions from the stored branch columns go
// through functional_scale.

#include <cmath>
#include <cstddef>
#include <utility>

#include "stokeswave/babenko.hpp"
#include "stokeswave/conserved.hpp"
#include "stokeswave/grid.hpp"
#include "stokeswave/pencil.hpp"

namespace stokeswave {

struct ChainOptions {
  double inner_rel_tol = 1e-13;    // MINRES tolerance for the L solves
  std::size_t inner_max_iter = 4000;
  double solvability_tol = 1e-9;   // bound on zero modes that must vanish
};

/// Solves K w = rhs by spectral division on the nonzero modes. The zero
/// mode of the right-hand side must vanish (Fredhold condition, Ker K =
/// span(1)); a large zero mode is a bug upstream, not data, and raises
/// SolvabilityViolation. The solution satisfies <1, w> = 0.
inline GridFunction solve_K(const GridFunction& rhs, double solvability_tol = 1e-9) {
  auto ch = rhs.spectrum();
  const double zero_mode = std::abs(ch[0].real());
  if (zero_mode > solvability_tol * std::max(1.0, norm_l2(rhs)))
    throw SolvabilityViolation("solve_K: zero mode of the right-hand side is " +
                                   std::to_string(zero_mode),
                               zero_mode);
  ch[0] = 0.0;
  for (std::size_t k = 1; k < ch.size(); ++k) ch[k] /= static_cast<double>(k);
  ch.back() = 0.0;
  return GridFunction::from_spectrum(ch, rhs.size());
}

/// Back-substitution residuals of the three chain systems (L2 norms).
struct ChainResiduals {
  double chain1_w = 0.0, chain1_v = 0.0;
  double chain2_w = 0.0, chain2_v = 0.0;
  double chain3_w = 0.0, chain3_v = 0.0;
};

/// Wrong-parity content of each chain vector (L2 norms).
struct ParityDefects {
  double v1_odd = 0.0, w1_even = 0.0;
  double v2_even = 0.0, w2_odd = 0.0;
  double v3_odd = 0.0, w3_even = 0.0;
};

struct JordanChain {
  GridFunction v0;            // eta', the kernel vector
  GridFunction v1, w1;        // first generalized pair (= -d eta/dc, H eta)
  GridFunction v2t, w2t;      // reduced second pair: v2~ odd, w2~ even
  GridFunction v3t, w3t;      // reduced third pair: v3~ even, w3~ odd
  GridFunction deta_dc;
  double D = 0.0;             // D(c) = <K eta, eta> + 2c <K eta, d_c eta>
  double alpha = 0.0;         // <(1+2K eta), v3~>
  double alpha_ratio = 0.0;   // <1, M v3~> / <1, M 1>, equal to alpha
  double B_coeff = 0.0;       // <eta', w3~> - 2c <K eta, v3~>
  double eta_prime_norm_sq = 0.0;
  double fredholm_defect_2 = 0.0;  // residual eta'-component after the D-term
  ChainResiduals residuals;
  ParityDefects parity;
};

/// D(c) evaluated directly through d eta/dc (the det-eq route); equals
/// P'(c) in the normalized convention.
inline double solvability_constant(const StokesWave& wave, const GridFunction& deta_dc) {
  const GridFunction keta = k_op(wave.eta);
  return inner(keta, wave.eta) + 2.0 * wave.c * inner(keta, deta_dc);
}

/// First element of the Jordan chain with a1 = 1, a2 = 0:
///   K w1 = M eta',  L v1 = -2c H eta',
/// fixed by <1, w1> = 0 and <eta', v1> = 0. Closed forms w1 = H eta and
/// v1 = -d eta/dc are recovered to solver accuracy.
inline std::pair<GridFunction, GridFunction> chain_first(const PencilOperators& ops,
                                                         const ChainOptions& opt = {}) {
  const StokesWave& wave = ops.wave();
  GridFunction w1 = solve_K(ops.apply_M(ops.eta_prime()), opt.solvability_tol);

  GridFunction rhs = (-2.0 * wave.c) * hilbert(ops.eta_prime());
  KrylovOptions kopt;
  kopt.rel_tol = opt.inner_rel_tol;
  kopt.max_iter = opt.inner_max_iter;
  LinearSolveInfo info;
  GridFunction v1 = solve_linearized(ops.linearization(), ops.eta_prime(), rhs, kopt, &info);
  if (!info.converged && info.residual_norm > 1e-9 * std::max(1.0, norm_l2(rhs)))
    throw FoldPoint("chain_first: L solve stagnated");
  return {std::move(v1), std::move(w1)};
}

/// Reduced second pair:
///   K w2~ = -M d_c eta,   L v2~ = 2c H d_c eta + M* H eta - (D/||eta'||^2) eta',
/// with <1, w2~> = 0, <eta', v2~> = 0. The projection term makes the system
/// solvable off the extremum as well.
inline std::pair<GridFunction, GridFunction> chain_second(const PencilOperators& ops,
                                                          const GridFunction& deta_dc,
                                                          double D,
                                                          double* fredholm_defect = nullptr,
                                                          const ChainOptions& opt = {}) {
  const StokesWave& wave = ops.wave();
  GridFunction w2 = solve_K(-1.0 * ops.apply_M(deta_dc), opt.solvability_tol);

  const GridFunction eta_prime = ops.eta_prime();
  const double np2 = inner(eta_prime, eta_prime);
  GridFunction rhs = (2.0 * wave.c) * hilbert(deta_dc) + ops.apply_M_star(hilbert(wave.eta)) -
                     (D / np2) * eta_prime;
  if (fredholm_defect) *fredholm_defect = std::abs(inner(eta_prime, rhs)) / std::sqrt(np2);

  KrylovOptions kopt;
  kopt.rel_tol = opt.inner_rel_tol;
  kopt.max_iter = opt.inner_max_iter;
  LinearSolveInfo info;
  GridFunction v2 = solve_linearized(ops.linearization(), eta_prime, rhs, kopt, &info);
  if (!info.converged && info.residual_norm > 1e-9 * std::max(1.0, norm_l2(rhs)))
    throw FoldPoint("chain_second: L solve stagnated");
  return {std::move(v2), std::move(w2)};
}

/// Reduced third pair:
///   K w3~ = M v2~,   L v3~ = -2c H v2~ + M* w2~,
/// with <1, w3~> = 0, <eta', v3~> = 0. The zero mode of M v2~ vanishes by
/// parity (v2~ odd).
inline std::pair<GridFunction, GridFunction> chain_third(const PencilOperators& ops,
                                                         const GridFunction& v2t,
                                                         const GridFunction& w2t,
                                                         const ChainOptions& opt = {}) {
  const StokesWave& wave = ops.wave();
  GridFunction w3 = solve_K(ops.apply_M(v2t), opt.solvability_tol);

  GridFunction rhs = (-2.0 * wave.c) * hilbert(v2t) + ops.apply_M_star(w2t);
  KrylovOptions kopt;
  kopt.rel_tol = opt.inner_rel_tol;
  kopt.max_iter = opt.inner_max_iter;
  LinearSolveInfo info;
  GridFunction v3 = solve_linearized(ops.linearization(), ops.eta_prime(), rhs, kopt, &info);
  if (!info.converged && info.residual_norm > 1e-9 * std::max(1.0, norm_l2(rhs)))
    throw FoldPoint("chain_third: L solve stagnated");
  return {std::move(v3), std::move(w3)};
}

/// B = <eta', w3~> - 2c <K eta, v3~>, defined with the orthogonality
/// conditions of the reduced chains enforced.
inline double coefficient_B(const StokesWave& wave, const GridFunction& v3t,
                            const GridFunction& w3t) {
  return inner(derivative(wave.eta), w3t) - 2.0 * wave.c * inner(k_op(wave.eta), v3t);
}

/// alpha = <1, M v3~> / <1, M 1> = <(1+2K eta), v3~>; the denominator
/// identity <1, M 1> = 1 is checked to 1e-11.
inline double alpha_constant(const PencilOperators& ops, const GridFunction& v3t,
                             double* ratio_form = nullptr) {
  const std::size_t n = ops.size();
  auto one = GridFunction::sample(n, [](double) { return 1.0; });
  const double denom = inner(one, ops.apply_M(one));
  if (std::abs(denom - 1.0) > 1e-11)
    throw SolvabilityViolation("alpha_constant: <1, M 1> deviates from 1",
                               std::abs(denom - 1.0));
  const double reduced = inner(ops.one_plus_2keta(), v3t);
  if (ratio_form) *ratio_form = inner(one, ops.apply_M(v3t)) / denom;
  return reduced;
}

/// Builds the full chain at (or near) a momentum extremum and evaluates all
/// derived constants and diagnostics.
inline JordanChain build_chain(const PencilOperators& ops, const ChainOptions& opt = {}) {
  const StokesWave& wave = ops.wave();
  const GridFunction eta_prime = ops.eta_prime();

  GridFunction deta = d_eta_dc(wave);
  const double D = solvability_constant(wave, deta);

  auto [v1, w1] = chain_first(ops, opt);
  double defect2 = 0.0;
  auto [v2t, w2t] = chain_second(ops, deta, D, &defect2, opt);
  auto [v3t, w3t] = chain_third(ops, v2t, w2t, opt);

  JordanChain chain{eta_prime, v1,  w1,  v2t, w2t, v3t, w3t, deta,
                    D,         0.0, 0.0, 0.0, 0.0, 0.0, {},  {}};
  chain.eta_prime_norm_sq = inner(eta_prime, eta_prime);
  chain.fredholm_defect_2 = defect2;
  chain.B_coeff = coefficient_B(wave, v3t, w3t);
  chain.alpha = alpha_constant(ops, v3t, &chain.alpha_ratio);

  // back-substitution residuals of the three systems
  const double c = wave.c;
  chain.residuals.chain1_w = norm_l2(k_op(w1) - ops.apply_M(eta_prime));
  chain.residuals.chain1_v = norm_l2(ops.apply_L(v1) + (2.0 * c) * hilbert(eta_prime));
  chain.residuals.chain2_w = norm_l2(k_op(w2t) + ops.apply_M(deta));
  chain.residuals.chain2_v =
      norm_l2(ops.apply_L(v2t) - ((2.0 * c) * hilbert(deta) +
                                  ops.apply_M_star(hilbert(wave.eta)) -
                                  (D / chain.eta_prime_norm_sq) * eta_prime));
  chain.residuals.chain3_w = norm_l2(k_op(w3t) - ops.apply_M(v2t));
  chain.residuals.chain3_v = norm_l2(ops.apply_L(v3t) -
                                     ((-2.0 * c) * hilbert(v2t) + ops.apply_M_star(w2t)));

  // parity ladder: v1 even, w1 odd; v2~ odd, w2~ even; v3~ even, w3~ odd
  chain.parity.v1_odd = norm_l2(project_odd(v1));
  chain.parity.w1_even = norm_l2(project_even(w1));
  chain.parity.v2_even = norm_l2(project_even(v2t));
  chain.parity.w2_odd = norm_l2(project_odd(w2t));
  chain.parity.v3_odd = norm_l2(project_odd(v3t));
  chain.parity.w3_even = norm_l2(project_even(w3t));
  return chain;
}

/// Normal-form data at a critical point. P2 is P''(c0) in the normalized
/// convention; lambda1_sq = -P2 / B is the slope of lambda^2 against the
/// signed offset eps = c - c0.
struct NormalFormPrediction {
  double c0 = 0.0;
  double s0 = 0.0;
  double P2 = 0.0;
  double B_coeff = 0.0;
  double lambda1_sq = 0.0;
};

inline NormalFormPrediction make_prediction(const MomentumExtremum& ex, double B_coeff,
                                            double degenerate_tol = 1e-6) {
  NormalFormPrediction p;
  p.c0 = ex.c_star;
  p.s0 = ex.s_star;
  p.P2 = ex.d2P_dc2 / functional_scale;
  p.B_coeff = B_coeff;
  if (std::abs(p.P2) < degenerate_tol)
    throw DegenerateExtremum("make_prediction: |P''(c0)| below threshold");
  if (B_coeff == 0.0) throw DegenerateExtremum("make_prediction: B = 0");
  p.lambda1_sq = -p.P2 / B_coeff;
  return p;
}

/// lambda^2 = -(c - c0) P''(c0) / B at leading order: positive (a real
/// unstable pair) on one side of the extremum, negative (an imaginary pair)
/// on the other.
inline double predict_splitting(const NormalFormPrediction& pred, double eps) {
  return pred.lambda1_sq * eps;
}

inline bool splitting_is_real_pair(const NormalFormPrediction& pred, double eps) {
  return predict_splitting(pred, eps) > 0.0;
}

}  // namespace stokeswave
