#include "scwave/wave.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace scwave {

std::string_view to_string(CostKind kind) { return kind == CostKind::c1 ? "c1" : "c2"; }

CostKind parse_cost_kind(std::string_view s) {
  if (s == "c1" || s == "C1") return CostKind::c1;
  if (s == "c2" || s == "C2") return CostKind::c2;
  throw std::invalid_argument("unknown cost kind '" + std::string(s) + "' (expected c1 or c2)");
}

namespace {

CostReport run_t20(const EnsembleSpec& spec, double epsilon, int target, int max_iters) {
  DensityEvolution de(spec, epsilon);
  CostReport r;
  r.kind = CostKind::c1;
  r.target = target;
  r.chain_length = spec.L;
  bool reached = false;
  while (de.iteration() < max_iters) {
    de.step();
    if (!reached) {
      const auto left = wave_position(de.x());
      const auto right = wave_position(de.x().reverse());
      const bool l_hit = left.defined && left.value >= target;
      const bool r_hit = right.defined && right.value >= target;
      if (l_hit || r_hit) {
        reached = true;
        const bool take_left = l_hit && (!r_hit || left.value >= right.value);
        r.front = take_left ? Front::left : Front::right;
        r.iterations = de.iteration();
        r.wave_position_at_stop = take_left ? left.value : right.value;
      }
    }
    if (de.converged()) {
      r.converged = true;
      break;
    }
    if (de.stalled()) break;
  }
  if (r.converged && reached) {
    r.feasible = true;
    r.cost = r.iterations - r.wave_position_at_stop * 2.0 / spec.L;
  }
  return r;
}

}  // namespace

CostReport estimate_t20(const EnsembleSpec& spec, double epsilon, int target, int max_iters) {
  auto r = run_t20(spec, epsilon, target, max_iters);
  // The middle collapsed before the front got to the target: retry on a longer chain.
  if (r.converged && !r.feasible) r = run_t20(spec.with_length(2 * spec.L), epsilon, target, max_iters);
  return r;
}

CostReport estimate_t10_tilde(const EnsembleSpec& spec, double epsilon, int position,
                              int max_iters) {
  DensityEvolution de(spec, epsilon);
  CostReport r;
  r.kind = CostKind::c2;
  r.target = position;
  r.chain_length = spec.L;
  const int p = std::clamp(position, 1, spec.L);
  const Eigen::Index left_index = p - 1;
  const Eigen::Index right_index = spec.L - p;
  bool reached = false;
  while (de.iteration() < max_iters) {
    de.step();
    if (!reached) {
      const bool l_hit = de.x()[left_index] < kConvergenceCutoff;
      const bool r_hit = de.x()[right_index] < kConvergenceCutoff;
      if (l_hit || r_hit) {
        reached = true;
        const auto left = wave_position(de.x());
        const auto right = wave_position(de.x().reverse());
        const double lv = left.defined ? left.value : 0.0;
        const double rv = right.defined ? right.value : 0.0;
        const bool take_left = l_hit && (!r_hit || lv >= rv);
        r.front = take_left ? Front::left : Front::right;
        r.iterations = de.iteration();
        r.wave_position_at_stop = take_left ? lv : rv;
      }
    }
    if (de.converged()) {
      r.converged = true;
      break;
    }
    if (de.stalled()) break;
  }
  if (r.converged && reached) {
    r.feasible = true;
    r.cost = r.iterations - r.wave_position_at_stop * 2.0 / spec.L;
  }
  return r;
}

CostReport evaluate_cost(CostKind kind, const EnsembleSpec& spec, double epsilon, int max_iters) {
  return kind == CostKind::c1 ? estimate_t20(spec, epsilon, 20, max_iters)
                              : estimate_t10_tilde(spec, epsilon, 10, max_iters);
}

namespace {

// Largest-over-window displacement time for one front; 0 if not measurable.
int displacement_time(const std::vector<Vector>& history, Front side, int w, int D) {
  const int L = static_cast<int>(history.front().size());
  const int half = L / 2;
  if (half < D + 1) return 0;
  auto at = [&](std::size_t t, int z) {  // 1-based z, measured from the front's end
    return side == Front::left ? history[t][z - 1] : history[t][L - z];
  };
  const std::size_t H = history.size();
  std::vector<double> wp(H, -1.0);
  for (std::size_t t = 0; t < H; ++t) {
    const auto p = front_position(history[t], side);
    if (p.defined) wp[t] = p.value;
  }
  std::size_t t0 = 1;
  while (t0 < H && !(wp[t0] >= w + 2)) ++t0;
  if (t0 >= H) return 0;
  std::size_t t_end = t0;
  while (t_end + 1 < H && wp[t_end + 1] >= 0.0 && wp[t_end] < half - D) ++t_end;

  int worst = 0;
  for (std::size_t t = t0; t <= t_end; ++t) {
    int found = 0;
    for (std::size_t T = 1; t + T < H; ++T) {
      bool displaced = true;
      for (int z = D + 1; z <= half && displaced; ++z)
        displaced = at(t + T, z) <= at(t, z - D) * (1.0 + 1e-12);
      if (displaced) {
        found = static_cast<int>(T);
        break;
      }
    }
    if (found == 0) return 0;
    worst = std::max(worst, found);
  }
  return worst;
}

}  // namespace

SpeedEstimate speed_displacement(const EnsembleSpec& spec, double epsilon, int D, int max_iters) {
  if (D < 1) throw std::invalid_argument("displacement D must be >= 1");
  SpeedEstimate est;
  est.method = SpeedMethod::displacement;
  est.target = D;

  DensityEvolution de(spec, epsilon);
  std::vector<Vector> history{de.x()};
  bool converged = false;
  while (de.iteration() < max_iters) {
    de.step();
    history.push_back(de.x());
    if (de.converged()) {
      converged = true;
      break;
    }
    if (de.stalled()) break;
  }
  if (!converged) return est;

  const int w = spec.coupling_width();
  const int t_left = displacement_time(history, Front::left, w, D);
  const int t_right = displacement_time(history, Front::right, w, D);
  if (t_left == 0 && t_right == 0) return est;
  const bool take_left = t_left > 0 && (t_right == 0 || t_left <= t_right);
  est.iterations = take_left ? t_left : t_right;
  est.front = take_left ? Front::left : Front::right;
  est.v = static_cast<double>(D) / est.iterations;
  est.feasible = true;
  return est;
}

SpeedEstimate speed_wavefront(const EnsembleSpec& spec, double epsilon, int target, int max_iters) {
  const auto r = estimate_t20(spec, epsilon, target, max_iters);
  SpeedEstimate est;
  est.method = SpeedMethod::wavefront;
  est.target = target;
  est.iterations = r.iterations;
  est.feasible = r.feasible;
  est.front = r.front;
  est.v = r.speed();
  return est;
}

}  // namespace scwave
