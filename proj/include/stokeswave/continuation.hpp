#pragma once

// Branch continuation from the small-amplitude limit. The default mode
// parameterizes by steepness, which stays monotone through the fold points
// of c(s); plain speed stepping and a pseudo-arclength fallback are also
// provided. The grid doubles whenever the top octave of the profile
// spectrum rises above a threshold.

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "stokeswave/babenko.hpp"
#include "stokeswave/branch.hpp"
#include "stokeswave/conserved.hpp"

namespace stokeswave {

enum class ContinuationMode { Speed, Steepness, ArcLength };

struct ContinuationConfig {
  ContinuationMode mode = ContinuationMode::Steepness;
  double step = 2e-3;        // initial step in s (or in c for speed mode)
  double min_step = 1e-8;
  double max_step = 3e-3;
  double tol = 1e-13;        // Newton residual tolerance
  std::size_t initial_modes = 256;
  std::size_t max_modes = 16384;
  double spectral_tail_threshold = 1e-13;
  NewtonOptions newton;
};

inline constexpr double limiting_steepness = 0.1411;

using PointCallback = std::function<void(const StokesWave&, const BranchPoint&)>;

namespace detail {

/// Doubles the grid until the top-octave tail of eta falls below the
/// threshold (or the cap is reached), re-converging at fixed steepness.
inline StokesWave resolve_tail(StokesWave wave, const ContinuationConfig& cfg) {
  NewtonOptions nopt = cfg.newton;
  nopt.tol = cfg.tol;
  while (wave.n_modes() < cfg.max_modes &&
         spectral_tail(wave.eta) > cfg.spectral_tail_threshold) {
    const std::size_t n2 = wave.n_modes() * 2;
    wave = newton_solve_steepness(resample(wave.eta, n2), wave.c, wave.s, nopt);
  }
  return wave;
}

inline StokesWave first_branch_wave(double s_target, const ContinuationConfig& cfg) {
  const double a = amplitude_for_steepness(s_target);
  NewtonOptions nopt = cfg.newton;
  nopt.tol = cfg.tol;
  return newton_solve_steepness(small_amplitude_eta(cfg.initial_modes, a),
                                small_amplitude_speed(a), s_target, nopt);
}

}  // namespace detail

/// Traces the branch from the small-amplitude limit up to s_max. Every
/// accepted point satisfies the wave invariants at the configured tolerance;
/// the returned branch always contains the trivial point s = 0. The callback
/// receives each converged wave along with its summary row.
inline Branch continue_branch(const ContinuationConfig& cfg, double s_max,
                              const PointCallback& on_point = {}) {
  if (!(s_max < limiting_steepness))
    throw InvalidArgument("continue_branch: s_max must be below the limiting steepness");
  if (cfg.step <= 0.0 || cfg.tol < 1e-14)
    throw InvalidArgument("continue_branch: bad step or tolerance");

  Branch branch;
  branch.points.push_back(BranchPoint{0.0, 1.0, 0.0, 0.0, 0.0, 0.0, cfg.initial_modes});

  if (cfg.mode == ContinuationMode::Speed) {
    // plain speed stepping; fails at the first fold of c(s). Near the
    // bifurcation at c = 1 the zero solution competes for the Newton basin,
    // so steps that fall back to smaller steepness are halved and retried.
    double dc = cfg.step;
    const double a0 = 0.03;
    NewtonOptions nopt = cfg.newton;
    nopt.tol = cfg.tol;
    StokesWave wave = newton_solve(small_amplitude_eta(cfg.initial_modes, a0),
                                   small_amplitude_speed(a0), nopt);
    StokesWave prev = wave;
    {
      BranchPoint p = branch_point_of(wave);
      if (p.s > 0.0 && p.s <= s_max) {
        branch.points.push_back(p);
        if (on_point) on_point(wave, p);
      }
    }
    while (wave.s < s_max) {
      const double c_next = wave.c + dc;
      GridFunction guess = wave.eta;
      if (prev.c < wave.c) {
        const double theta = dc / (wave.c - prev.c);
        guess = wave.eta + theta * (wave.eta - resample(prev.eta, wave.n_modes()));
      }
      try {
        StokesWave next = newton_solve(guess, c_next, nopt);
        next = detail::resolve_tail(next, cfg);
        if (next.s <= wave.s)
          throw NonConvergence("collapsed toward the zero branch", next.s, 0);
        if (next.s > s_max) break;
        prev = std::move(wave);
        wave = std::move(next);
        BranchPoint p = branch_point_of(wave);
        branch.points.push_back(p);
        if (on_point) on_point(wave, p);
      } catch (const SingularJacobian&) {
        dc *= 0.5;
        if (dc < cfg.min_step)
          throw StepFailure("speed continuation: fold point reached at s = " +
                            std::to_string(wave.s));
      } catch (const NonConvergence&) {
        dc *= 0.5;
        if (dc < cfg.min_step)
          throw StepFailure("speed continuation: cannot advance past s = " +
                            std::to_string(wave.s));
      }
    }
    return branch;
  }

  // steepness (default) and arclength modes share the bordered solver and
  // differ only in the constraint closing each step
  double step = std::min(cfg.step, s_max);
  if (step <= 0.0 || s_max < cfg.min_step) return branch;

  StokesWave wave = detail::first_branch_wave(step, cfg);
  wave = detail::resolve_tail(wave, cfg);
  std::vector<StokesWave> history{wave};
  {
    BranchPoint p = branch_point_of(wave);
    branch.points.push_back(p);
    if (on_point) on_point(wave, p);
  }

  int consecutive_good = 0;
  while (wave.s < s_max - 1e-12) {
    const double s_target = std::min(wave.s + step, s_max);

    // predictor: linear extrapolation from the last two points
    GridFunction guess_eta = wave.eta;
    double guess_c = wave.c;
    if (history.size() >= 2) {
      const StokesWave& w2 = history[history.size() - 2];
      const double span = wave.s - w2.s;
      if (span > 0.0) {
        const double theta = (s_target - wave.s) / span;
        GridFunction prev_eta = resample(w2.eta, wave.n_modes());
        guess_eta = wave.eta + theta * (wave.eta - prev_eta);
        guess_c = wave.c + theta * (wave.c - w2.c);
      }
    }

    try {
      NewtonOptions nopt = cfg.newton;
      nopt.tol = cfg.tol;
      StokesWave next{GridFunction(4), 0.0, 0.0, 0.0};
      if (cfg.mode == ContinuationMode::Steepness || history.size() < 2) {
        next = newton_solve_steepness(guess_eta, guess_c, s_target, nopt);
      } else {
        // pseudo-arclength: close the step with orthogonality to the secant
        // tangent (tau_eta, tau_c) = (d eta/ds, dc/ds), advanced so the
        // predicted landing is at s_target:
        //   <tau_eta, eta> + tau_c c = <tau_eta, eta0> + tau_c c0
        //                              + ds (<tau_eta,tau_eta> + tau_c^2)
        const StokesWave& w2 = history[history.size() - 2];
        const double ds_prev = wave.s - w2.s;
        GridFunction tau_eta =
            (1.0 / ds_prev) * (wave.eta - resample(w2.eta, wave.n_modes()));
        const double tau_c = (wave.c - w2.c) / ds_prev;
        const double ds = s_target - wave.s;
        const double target = inner(tau_eta, wave.eta) + tau_c * wave.c +
                              ds * (inner(tau_eta, tau_eta) + tau_c * tau_c);
        LinearConstraint arc{
            [tau_eta](const GridFunction& e) { return inner(tau_eta, e); }, tau_c,
            target};
        next = newton_solve_bordered(guess_eta, guess_c, arc, nopt);
        if (!(next.s > wave.s))
          throw NonConvergence("arclength step did not advance in s", next.s, 0);
      }
      next = detail::resolve_tail(next, cfg);

      wave = std::move(next);
      history.push_back(wave);
      if (history.size() > 2) history.erase(history.begin());
      BranchPoint p = branch_point_of(wave);
      branch.points.push_back(p);
      if (on_point) on_point(wave, p);

      if (++consecutive_good >= 3 && step < cfg.max_step) {
        step = std::min(step * 1.4, cfg.max_step);
        consecutive_good = 0;
      }
    } catch (const NonConvergence&) {
      step *= 0.5;
      consecutive_good = 0;
      if (step < cfg.min_step)
        throw StepFailure("continuation: minimal step failed at s = " +
                          std::to_string(wave.s));
    } catch (const SingularJacobian&) {
      step *= 0.5;
      consecutive_good = 0;
      if (step < cfg.min_step)
        throw StepFailure("continuation: minimal step failed at s = " +
                          std::to_string(wave.s));
    }
  }
  return branch;
}

/// Re-converges a wave on a prescribed grid at fixed steepness.
inline StokesWave refine_wave(const StokesWave& w, std::size_t n_modes, double tol) {
  NewtonOptions opt;
  opt.tol = tol;
  return newton_solve_steepness(resample(w.eta, n_modes), w.c, w.s, opt);
}

}  // namespace stokeswave
