#ifndef SCWAVE_OPTIMIZER_HPP
#define SCWAVE_OPTIMIZER_HPP

#include "scwave/ensemble.hpp"
#include "scwave/parallel.hpp"
#include "scwave/wave.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scwave {

struct OptimizerConfig {
  int w = 3;
  std::vector<int> dv_set{3, 4, 5, 6, 7, 8, 9, 10};
  /// dc = dc_ratio * dv (2 gives rate 1/2 ensembles).
  int dc_ratio = 2;
  double epsilon = 0.46;
  CostKind cost_kind = CostKind::c2;
  int population_multiplier = 100;
  int generations = 1000;
  double crossover_prob = 0.33;
  std::uint64_t seed = 1;
  /// Chain length used inside cost evaluations.
  int L = 100;
  int max_iters = kDefaultMaxIters;

  int dimension() const { return w - 1; }
  int population_size() const { return population_multiplier * dimension(); }
  void validate() const;
};

class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element-wise min(|x|, 1).
template <typename Derived>
auto f_sat(const Eigen::MatrixBase<Derived>& x) {
  return x.cwiseAbs().cwiseMin(typename Derived::Scalar(1));
}

/// Maps a (w-1)-dimensional search vector to (p_0, ..., p_{w-2}, 1 - sum p).
/// Returns nullopt when the implied last weight would be negative.
std::optional<SmoothingProfile> decode_candidate(const Eigen::Ref<const Vector>& p);

struct OptimizerState {
  int dv = 3;
  /// D x N_P; column i is population member p_i.
  Eigen::MatrixXd population;
  Vector costs;
  Vector best;
  double best_cost = kInfeasibleCost;
  int generation = 0;
  /// Best cost after initialization and after each generation.
  std::vector<double> trace;
  std::uint64_t evaluations = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t init_rejections = 0;
  /// Memoized costs keyed on the candidate quantized to 1e-12.
  std::map<std::vector<std::int64_t>, double> cache;
};

/// Cost of a search vector under `config` at VN degree `dv`; +inf when the
/// vector does not decode to a profile or DE does not converge.
CostReport candidate_cost(const OptimizerConfig& config, int dv, const Eigen::Ref<const Vector>& p);

/// Draws N_P members uniformly from the probability simplex, keeping only
/// those whose DE converges at config.epsilon. Throws InitializationError
/// after 10 * N_P consecutive rejections.
OptimizerState sample_initial_population(const OptimizerConfig& config, int dv);

/// One differential-evolution generation.
void evolve(OptimizerState& state, const OptimizerConfig& config);

/// Initialization followed by config.generations generations. `progress`
/// (optional) is called after every generation.
OptimizerState run_differential_evolution(
    const OptimizerConfig& config, int dv,
    const std::function<void(const OptimizerState&)>& progress = {});

struct AlphaSearchResult {
  double alpha = 0.0;
  double cost = kInfeasibleCost;
  bool feasible = false;
};

/// w = 2 line search over nu = (alpha, 1 - alpha), alpha in [0, 1/2], on C1:
/// a grid at `grid_step` followed by a golden-section pass around the best
/// grid point.
AlphaSearchResult optimize_w2_alpha(int dv, double epsilon, double grid_step = 0.005,
                                    int dc_ratio = 2, int L = 100,
                                    int max_iters = kDefaultMaxIters);

struct DegreeResult {
  int dv = 0;
  int dc = 0;
  bool feasible = false;
  /// Oriented so the faster front enters at position 1.
  SmoothingProfile profile;
  /// Final cost under the optimizer's cost kind.
  double cost = kInfeasibleCost;
  /// C1 recomputed for the final profile.
  CostReport t20;
  double speed = 0.0;
  std::vector<double> trace;
  std::string note;
};

struct DegreeSearchReport {
  std::vector<DegreeResult> per_degree;
  /// Index into per_degree of the lowest-C1 feasible result.
  int winner = -1;

  const DegreeResult& best() const { return per_degree.at(static_cast<std::size_t>(winner)); }
};

/// Optimizes the profile for every dv in config.dv_set (line search for
/// w = 2, differential evolution otherwise) and keeps the dv with lowest C1.
/// Throws OptimizationError if no degree yields a feasible profile.
DegreeSearchReport optimize_over_degrees(
    const OptimizerConfig& config,
    const std::function<void(int dv, const OptimizerState&)>& progress = {});

}  // namespace scwave

#endif  // SCWAVE_OPTIMIZER_HPP
