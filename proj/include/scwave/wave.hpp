#ifndef SCWAVE_WAVE_HPP
#define SCWAVE_WAVE_HPP

#include "scwave/density_evolution.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string_view>

namespace scwave {

/// Interpolated position of the decoding wavefront. `anchor` is the 1-based
/// spatial position A with x_A below half the mid-chain value and
/// x_{A+1} at or above it.
struct WavePosition {
  double value = 0.0;
  int anchor = 0;
  bool defined = false;
};

/// Front position over the left half of the chain, measured against half of
/// x_{floor(L/2)}. Undefined when the middle has collapsed or no crossing
/// exists. When several crossings exist the one closest to the middle wins.
template <typename Derived>
WavePosition wave_position(const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Index L = x.size();
  WavePosition wp;
  if (L < 2) return wp;
  const Eigen::Index mid = L / 2;  // 1-based position floor(L/2)
  const double half = 0.5 * x[mid - 1];
  if (!(half > 0.0)) return wp;
  for (Eigen::Index a = mid - 1; a >= 1; --a) {
    const double xa = x[a - 1];
    const double xb = x[a];
    if (xa < half && xb >= half) {
      wp.anchor = static_cast<int>(a);
      wp.value = static_cast<double>(a) + (half - xa) / (xb - xa);
      wp.defined = true;
      return wp;
    }
  }
  return wp;
}

/// Which end of the chain the tracked front enters from. A right-entering
/// front of nu is the left-entering front of reversed nu (mirror symmetry).
enum class Front { left, right };

template <typename Derived>
WavePosition front_position(const Eigen::MatrixBase<Derived>& x, Front side) {
  return side == Front::left ? wave_position(x) : wave_position(x.reverse());
}

enum class CostKind { c1, c2 };
enum class SpeedMethod { displacement, wavefront };

std::string_view to_string(CostKind kind);
CostKind parse_cost_kind(std::string_view s);

inline constexpr double kInfeasibleCost = std::numeric_limits<double>::infinity();

struct CostReport {
  double cost = kInfeasibleCost;
  CostKind kind = CostKind::c1;
  /// T-bar_20 for C1, T-tilde_10 for C2.
  int iterations = 0;
  double wave_position_at_stop = 0.0;
  bool feasible = false;
  bool converged = false;
  Front front = Front::left;
  int target = 20;
  /// Chain length actually simulated (may exceed spec.L after a re-run).
  int chain_length = 0;

  /// target / iterations; meaningful for C1 reports.
  double speed() const { return feasible && iterations > 0 ? double(target) / iterations : 0.0; }
};

struct SpeedEstimate {
  double v = 0.0;
  SpeedMethod method = SpeedMethod::wavefront;
  int target = 20;
  int iterations = 0;
  bool feasible = false;
  Front front = Front::left;
};

/// C1 = T-bar_20 - W_P(T-bar_20) * 2/L, with T-bar_20 the first iteration at
/// which the faster front reaches `target`. Infeasible if DE does not
/// converge or the front never gets there (after one re-run at 2L).
CostReport estimate_t20(const EnsembleSpec& spec, double epsilon, int target = 20,
                        int max_iters = kDefaultMaxIters);

/// C2 = T-tilde_10 - W_P(T-tilde_10) * 2/L, with T-tilde_10 the first
/// iteration at which position `position` (counted from the faster front's
/// end) drops below kConvergenceCutoff. An undefined W_P contributes 0.
CostReport estimate_t10_tilde(const EnsembleSpec& spec, double epsilon, int position = 10,
                              int max_iters = kDefaultMaxIters);

CostReport evaluate_cost(CostKind kind, const EnsembleSpec& spec, double epsilon,
                         int max_iters = kDefaultMaxIters);

/// v_D = D / T_D, with T_D the largest over a measurement window of the
/// smallest T such that x_z^{(t+T)} <= x_{z-D}^{(t)} for all z <= floor(L/2).
/// The window runs from the first iteration with W_P >= w + 2 until W_P
/// reaches L/2 - D. Evaluated for both fronts; the faster one is reported.
SpeedEstimate speed_displacement(const EnsembleSpec& spec, double epsilon, int D = 20,
                                 int max_iters = kDefaultMaxIters);

/// 20 / T-bar_20 via estimate_t20.
SpeedEstimate speed_wavefront(const EnsembleSpec& spec, double epsilon, int target = 20,
                              int max_iters = kDefaultMaxIters);

}  // namespace scwave

#endif  // SCWAVE_WAVE_HPP
