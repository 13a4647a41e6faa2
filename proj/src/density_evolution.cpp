#include "scwave/density_evolution.hpp"

#include "scwave/wave.hpp"

#include <limits>

namespace scwave {

DensityProfile de_step(const DensityProfile& profile, const EnsembleSpec& spec) {
  return {de_step(profile.x, spec, profile.epsilon), profile.t + 1, profile.epsilon};
}

DensityEvolution::DensityEvolution(const EnsembleSpec& spec, double epsilon)
    : nu_(spec.profile.weights()),
      dv_(spec.dv),
      dc_(spec.dc),
      epsilon_(epsilon),
      max_(epsilon),
      x_(Vector::Constant(spec.L, epsilon)) {
  next_.resize(spec.L);
  check_side_.resize(spec.L + spec.coupling_width() - 1);
}

void DensityEvolution::step() {
  detail::de_step_kernel<double>(x_, nu_, dv_, dc_, epsilon_, check_side_, next_);
  last_change_ = (x_ - next_).cwiseAbs().maxCoeff();
  x_.swap(next_);
  max_ = x_.maxCoeff();
  ++t_;
}

DERunReport de_run(const EnsembleSpec& spec, double epsilon, int max_iters, HistoryPolicy record) {
  DensityEvolution de(spec, epsilon);
  DERunReport report;
  while (de.iteration() < max_iters) {
    de.step();
    if (record == HistoryPolicy::full) report.profiles.push_back(de.x());
    if (record != HistoryPolicy::none) {
      const auto wp = wave_position(de.x());
      report.wave_positions.push_back(wp.defined ? wp.value
                                                 : std::numeric_limits<double>::quiet_NaN());
    }
    if (de.converged()) {
      report.converged = true;
      break;
    }
    if (de.stalled()) break;
  }
  report.iterations_used = de.iteration();
  report.final_profile = de.profile();
  return report;
}

bool de_converges(const EnsembleSpec& spec, double epsilon, int max_iters) {
  DensityEvolution de(spec, epsilon);
  while (de.iteration() < max_iters) {
    de.step();
    if (de.converged()) return true;
    if (de.stalled()) return false;
  }
  return false;
}

double bp_threshold(const EnsembleSpec& spec, double tol, int max_iters) {
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    if (de_converges(spec, mid, max_iters))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace scwave
