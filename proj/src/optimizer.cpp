#include "scwave/optimizer.hpp"

#include <cmath>
#include <string>

namespace scwave {

void OptimizerConfig::validate() const {
  if (w < 2) throw std::invalid_argument("optimizer needs w >= 2");
  if (dv_set.empty()) throw std::invalid_argument("optimizer needs at least one dv");
  for (int dv : dv_set)
    if (dv < 2) throw std::invalid_argument("dv must be >= 2");
  if (dc_ratio < 2) throw std::invalid_argument("dc ratio must be >= 2");
  if (population_multiplier < 1) throw std::invalid_argument("population multiplier must be >= 1");
  if (population_size() < 3) throw std::invalid_argument("population needs at least 3 members");
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (!(crossover_prob > 0.0 && crossover_prob < 1.0))
    throw std::invalid_argument("crossover probability must lie in (0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (L < w) throw std::invalid_argument("chain length must be >= w");
}

std::optional<SmoothingProfile> decode_candidate(const Eigen::Ref<const Vector>& p) {
  const double head = p.sum();
  if (head > 1.0 + 1e-12 || (p.array() < 0.0).any()) return std::nullopt;
  Vector nu(p.size() + 1);
  nu.head(p.size()) = p;
  nu[p.size()] = std::max(0.0, 1.0 - head);
  return SmoothingProfile(nu);
}

namespace {

EnsembleSpec spec_for(const OptimizerConfig& config, int dv, SmoothingProfile profile) {
  EnsembleSpec s;
  s.dv = dv;
  s.dc = config.dc_ratio * dv;
  s.L = config.L;
  s.profile = std::move(profile);
  return s;
}

std::vector<std::int64_t> cache_key(const Eigen::Ref<const Vector>& p) {
  std::vector<std::int64_t> key(static_cast<std::size_t>(p.size()));
  for (Eigen::Index j = 0; j < p.size(); ++j) key[static_cast<std::size_t>(j)] = std::llround(p[j] * 1e12);
  return key;
}

// Costs for the columns of `candidates`, reusing and filling the state's cache.
Vector evaluate_columns(OptimizerState& state, const OptimizerConfig& config,
                        const Eigen::MatrixXd& candidates, std::vector<char>* converged = nullptr) {
  const auto n = static_cast<std::size_t>(candidates.cols());
  Vector costs(candidates.cols());
  std::vector<std::vector<std::int64_t>> keys(n);
  std::vector<std::size_t> todo;
  std::map<std::vector<std::int64_t>, std::size_t> first_seen;
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = cache_key(candidates.col(static_cast<Eigen::Index>(i)));
    if (converged == nullptr && state.cache.count(keys[i])) continue;
    if (first_seen.emplace(keys[i], i).second) todo.push_back(i);
  }
  std::vector<CostReport> reports(todo.size());
  parallel_for(todo.size(), [&](std::size_t k) {
    reports[k] = candidate_cost(config, state.dv, candidates.col(static_cast<Eigen::Index>(todo[k])));
  });
  state.evaluations += todo.size();
  std::map<std::vector<std::int64_t>, const CostReport*> fresh;
  for (std::size_t k = 0; k < todo.size(); ++k) {
    fresh[keys[todo[k]]] = &reports[k];
    state.cache[keys[todo[k]]] = reports[k].cost;
  }
  if (converged) converged->assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = fresh.find(keys[i]);
    if (it == fresh.end()) ++state.cache_hits;
    costs[static_cast<Eigen::Index>(i)] = state.cache.at(keys[i]);
    if (converged) (*converged)[i] = it->second->converged;
  }
  return costs;
}

int draw_index(Rng& rng, int n) { return std::min(n - 1, static_cast<int>(uniform01(rng) * n)); }

}  // namespace

CostReport candidate_cost(const OptimizerConfig& config, int dv, const Eigen::Ref<const Vector>& p) {
  const auto profile = decode_candidate(p);
  if (!profile) {
    CostReport r;
    r.kind = config.cost_kind;
    return r;
  }
  return evaluate_cost(config.cost_kind, spec_for(config, dv, *profile), config.epsilon,
                       config.max_iters);
}

OptimizerState sample_initial_population(const OptimizerConfig& config, int dv) {
  config.validate();
  const int D = config.dimension();
  const int n_p = config.population_size();
  OptimizerState state;
  state.dv = dv;
  state.population.resize(D, n_p);
  state.costs.resize(n_p);

  int filled = 0;
  int consecutive_rejections = 0;
  std::uint64_t drawn = 0;
  while (filled < n_p) {
    // Batches of n_p draws; candidate k always comes from stream k.
    Eigen::MatrixXd batch(D, n_p);
    for (int b = 0; b < n_p; ++b) {
      Rng rng = make_stream(config.seed, {static_cast<std::uint64_t>(dv), 0, drawn + b});
      Vector e(D + 1);
      for (int j = 0; j <= D; ++j) e[j] = -std::log1p(-uniform01(rng));
      batch.col(b) = e.head(D) / e.sum();
    }
    drawn += static_cast<std::uint64_t>(n_p);
    std::vector<char> converged;
    const Vector costs = evaluate_columns(state, config, batch, &converged);
    for (int b = 0; b < n_p && filled < n_p; ++b) {
      if (!converged[static_cast<std::size_t>(b)]) {
        ++state.init_rejections;
        if (++consecutive_rejections >= 10 * n_p)
          throw InitializationError("could not initialize population at epsilon=" +
                                    std::to_string(config.epsilon) + " for dv=" + std::to_string(dv) +
                                    ": no converging profiles found (epsilon too close to or above "
                                    "threshold?)");
        continue;
      }
      consecutive_rejections = 0;
      state.population.col(filled) = batch.col(b);
      state.costs[filled] = costs[b];
      ++filled;
    }
  }
  Eigen::Index best = 0;
  state.best_cost = state.costs.minCoeff(&best);
  state.best = state.population.col(best);
  state.trace.push_back(state.best_cost);
  return state;
}

void evolve(OptimizerState& state, const OptimizerConfig& config) {
  const int D = static_cast<int>(state.population.rows());
  const int n_p = static_cast<int>(state.population.cols());
  const auto g = static_cast<std::uint64_t>(state.generation + 1);

  Eigen::MatrixXd candidates(D, n_p);
  for (int i = 0; i < n_p; ++i) {
    Rng rng = make_stream(config.seed, {static_cast<std::uint64_t>(state.dv), g, static_cast<std::uint64_t>(i)});
    int r1 = draw_index(rng, n_p);
    int r2 = r1;
    while (r2 == r1) r2 = draw_index(rng, n_p);
    int r3 = r1;
    while (r3 == r1 || r3 == r2) r3 = draw_index(rng, n_p);
    Vector v = f_sat(state.population.col(r1) + state.population.col(r2) - state.population.col(r3));
    for (int j = 0; j < D; ++j)
      if (uniform01(rng) < config.crossover_prob) v[j] = state.population(j, i);
    candidates.col(i) = v;
  }

  const Vector costs = evaluate_columns(state, config, candidates);
  for (int i = 0; i < n_p; ++i) {
    if (costs[i] < state.costs[i]) {
      state.population.col(i) = candidates.col(i);
      state.costs[i] = costs[i];
    }
    if (costs[i] < state.best_cost) {
      state.best_cost = costs[i];
      state.best = candidates.col(i);
    }
  }
  ++state.generation;
  state.trace.push_back(state.best_cost);
}

OptimizerState run_differential_evolution(const OptimizerConfig& config, int dv,
                                          const std::function<void(const OptimizerState&)>& progress) {
  OptimizerState state = sample_initial_population(config, dv);
  for (int g = 0; g < config.generations; ++g) {
    evolve(state, config);
    if (progress) progress(state);
  }
  return state;
}

AlphaSearchResult optimize_w2_alpha(int dv, double epsilon, double grid_step, int dc_ratio, int L,
                                    int max_iters) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) throw std::invalid_argument("grid step must lie in (0, 0.5]");
  EnsembleSpec base;
  base.dv = dv;
  base.dc = dc_ratio * dv;
  base.L = L;
  auto cost_at = [&](double alpha) {
    Vector nu(2);
    nu << alpha, 1.0 - alpha;
    return estimate_t20(base.with_profile(SmoothingProfile(nu)), epsilon, 20, max_iters).cost;
  };

  const int steps = static_cast<int>(std::floor(0.5 / grid_step + 1e-9));
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) grid[static_cast<std::size_t>(k)] = std::min(0.5, k * grid_step);
  std::vector<double> costs(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { costs[k] = cost_at(grid[k]); });

  AlphaSearchResult best;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (costs[k] < best.cost) {
      best.cost = costs[k];
      best.alpha = grid[k];
    }
  }
  if (!std::isfinite(best.cost)) return best;
  best.feasible = true;

  // Golden-section pass on the bracket around the best grid point.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(0.0, best.alpha - grid_step);
  double b = std::min(0.5, best.alpha + grid_step);
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = cost_at(c);
  double fd = cost_at(d);
  for (int it = 0; it < 20; ++it) {
    if (fc < best.cost) best = {c, fc, true};
    if (fd < best.cost) best = {d, fd, true};
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = cost_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = cost_at(d);
    }
  }
  if (fc < best.cost) best = {c, fc, true};
  if (fd < best.cost) best = {d, fd, true};
  return best;
}

namespace {

void finish(DegreeResult& r, const OptimizerConfig& config, SmoothingProfile profile) {
  const auto spec = spec_for(config, r.dv, profile);
  r.t20 = estimate_t20(spec, config.epsilon, 20, config.max_iters);
  r.feasible = r.t20.feasible;
  r.speed = r.t20.speed();
  r.profile = r.t20.front == Front::right ? profile.reversed() : profile;
}

}  // namespace

DegreeSearchReport optimize_over_degrees(
    const OptimizerConfig& config, const std::function<void(int, const OptimizerState&)>& progress) {
  config.validate();
  DegreeSearchReport report;
  for (int dv : config.dv_set) {
    DegreeResult r;
    r.dv = dv;
    r.dc = config.dc_ratio * dv;
    if (config.w == 2) {
      const auto a = optimize_w2_alpha(dv, config.epsilon, 0.005, config.dc_ratio, config.L, config.max_iters);
      if (a.feasible) {
        Vector nu(2);
        nu << a.alpha, 1.0 - a.alpha;
        r.cost = a.cost;
        finish(r, config, SmoothingProfile(nu));
      } else {
        r.note = "no converging alpha";
      }
    } else {
      try {
        auto state = run_differential_evolution(
            config, dv, [&](const OptimizerState& s) {
              if (progress) progress(dv, s);
            });
        r.trace = state.trace;
        if (std::isfinite(state.best_cost)) {
          r.cost = state.best_cost;
          finish(r, config, *decode_candidate(state.best));
        } else {
          r.note = "no feasible candidate";
        }
      } catch (const InitializationError& e) {
        r.note = e.what();
      }
    }
    report.per_degree.push_back(std::move(r));
  }
  for (std::size_t k = 0; k < report.per_degree.size(); ++k) {
    const auto& r = report.per_degree[k];
    if (!r.feasible) continue;
    if (report.winner < 0 || r.t20.cost < report.per_degree[static_cast<std::size_t>(report.winner)].t20.cost)
      report.winner = static_cast<int>(k);
  }
  if (report.winner < 0)
    throw OptimizationError("no feasible profile for any dv at epsilon=" + std::to_string(config.epsilon));
  return report;
}

}  // namespace scwave
