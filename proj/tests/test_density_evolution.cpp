#include "scwave/density_evolution.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace scwave;

namespace {

EnsembleSpec spec_of(int dv, int dc, std::vector<double> nu, int L = 100) {
  EnsembleConfig c;
  c.dv = dv;
  c.dc = dc;
  c.nu = std::move(nu);
  c.L = L;
  return make_spec(c);
}

EnsembleSpec uniform_spec(int dv, int dc, int w, int L = 100) {
  return spec_of(dv, dc, std::vector<double>(static_cast<std::size_t>(w), 1.0 / w), L);
}

const std::vector<double> kNu3A{0.37124, 0.00835, 0.62041};

}  // namespace

TEST_SUITE("density_evolution") {

TEST_CASE("trivial fixed points") {
  const auto spec = spec_of(3, 6, kNu3A);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(spec.L);
  for (auto& v : x) v = u(gen);
  CHECK(de_step(x, spec, 0.0).isZero(0.0));
  CHECK(de_step(Vector::Zero(spec.L), spec, 0.45).isZero(0.0));
}

TEST_CASE("uncoupled step matches the scalar recursion") {
  const auto spec = spec_of(3, 6, {1.0}, 10);
  const Vector x = Vector::Constant(10, 0.42);
  const Vector y = de_step(x, spec, 0.42);
  const double expected = 0.42 * std::pow(1.0 - std::pow(0.58, 5), 2);
  CHECK(y[5] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(y[5] == doctest::Approx(0.36668).epsilon(1e-4));
}

TEST_CASE("uniform profiles match the uniform-stencil oracle") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1400; ++trial) {
    const int w = 2 + trial % 7;
    const int dv = 3 + trial % 3;
    const auto spec = uniform_spec(dv, 2 * dv, w);
    const double eps = 0.3 + 0.2 * u(gen);
    std::vector<double> x(100);
    for (auto& v : x) v = eps * u(gen);
    const Vector got = de_step(Eigen::Map<const Vector>(x.data(), 100), spec, eps);
    const auto want = oracle::uniform_de_step(x, w, dv, 2 * dv, eps);
    for (int z = 0; z < 100; ++z) worst = std::max(worst, std::abs(got[z] - want[static_cast<std::size_t>(z)]));
  }
  CHECK(worst <= 1e-15);
}

TEST_CASE("long double instantiation agrees with double") {
  const auto spec = spec_of(4, 8, {0.3, 0.1, 0.6});
  const Vector x = Vector::LinSpaced(30, 0.1, 0.45);
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> xl = x.cast<long double>();
  const auto yl = de_step(xl, spec.with_length(30), 0.45L);
  const Vector y = de_step(x, spec.with_length(30), 0.45);
  CHECK((yl.cast<double>() - y).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("iterates are nonincreasing in t and bounded by epsilon") {
  for (double eps : {0.40, 0.46, 0.5}) {
    const auto spec = spec_of(3, 6, kNu3A);
    DensityProfile p = DensityProfile::initial(spec.L, eps);
    for (int t = 0; t < 1000 && p.x.maxCoeff() > 0.0; ++t) {
      const auto next = de_step(p, spec);
      CHECK(next.t == p.t + 1);
      REQUIRE((next.x.array() <= p.x.array()).all());
      REQUIRE((next.x.array() >= 0.0).all());
      REQUIRE((next.x.array() <= eps).all());
      p = next;
    }
  }
}

TEST_CASE("iterates are monotone in epsilon") {
  const auto spec = uniform_spec(4, 8, 4);
  DensityProfile a = DensityProfile::initial(spec.L, 0.44);
  DensityProfile b = DensityProfile::initial(spec.L, 0.47);
  for (int t = 0; t < 300; ++t) {
    a = de_step(a, spec);
    b = de_step(b, spec);
    REQUIRE((a.x.array() <= b.x.array()).all());
  }
}

TEST_CASE("reversed profile gives the mirrored chain") {
  std::mt19937_64 gen(5);
  std::exponential_distribution<double> e(1.0);
  for (int w = 2; w <= 8; ++w) {
    std::vector<double> nu(static_cast<std::size_t>(w));
    double s = 0.0;
    for (auto& v : nu) s += (v = e(gen));
    for (auto& v : nu) v /= s;
    const auto spec = spec_of(4, 8, nu);
    const auto mirror = spec.with_profile(spec.profile.reversed());
    DensityEvolution a(spec, 0.47), b(mirror, 0.47);
    double worst = 0.0;
    for (int t = 0; t < 400; ++t) {
      a.step();
      b.step();
      worst = std::max(worst, (a.x() - b.x().reverse()).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-15);
  }
}

TEST_CASE("boundary leads the middle below threshold") {
  const auto spec = spec_of(3, 6, kNu3A);
  DensityEvolution de(spec, 0.46);
  while (!de.converged() && de.iteration() < 2000) {
    de.step();
    const double mid = de.x()[spec.L / 2 - 1];
    if (mid == 0.0) break;
    REQUIRE(de.x()[0] < mid);
  }
}

TEST_CASE("de_run outcomes") {
  const auto spec = uniform_spec(3, 6, 3);
  const auto easy = de_run(spec, 0.40);
  CHECK(easy.converged);
  CHECK(easy.iterations_used < 500);
  CHECK(easy.final_profile.x.maxCoeff() < kConvergenceCutoff);

  const auto hard = de_run(spec, 0.55);
  CHECK_FALSE(hard.converged);

  const auto zero = de_run(spec, 0.0);
  CHECK(zero.converged);
  CHECK(zero.iterations_used == 1);
}

TEST_CASE("de_run history") {
  const auto spec = uniform_spec(3, 6, 3);
  const auto rep = de_run(spec, 0.45, kDefaultMaxIters, HistoryPolicy::full);
  REQUIRE(rep.converged);
  CHECK(rep.profiles.size() == static_cast<std::size_t>(rep.iterations_used));
  CHECK(rep.wave_positions.size() == rep.profiles.size());
  CHECK((rep.profiles.back() - rep.final_profile.x).isZero(0.0));
  const auto light = de_run(spec, 0.45, kDefaultMaxIters, HistoryPolicy::wave_position);
  CHECK(light.profiles.empty());
  CHECK(light.wave_positions.size() == static_cast<std::size_t>(light.iterations_used));
}

TEST_CASE("iteration cap is respected") {
  const auto rep = de_run(uniform_spec(3, 6, 3), 0.45, 7);
  CHECK(rep.iterations_used == 7);
  CHECK_FALSE(rep.converged);
}

TEST_CASE("uncoupled threshold matches the scalar oracle") {
  const double want = oracle::scalar_threshold(3, 6);
  const double got = bp_threshold(spec_of(3, 6, {1.0}, 10), 1e-5);
  CHECK(std::abs(got - want) < 1e-4);
  CHECK(std::abs(got - 0.4294) < 1e-3);
  CHECK(std::abs(bp_threshold(spec_of(4, 8, {1.0}, 10), 1e-5) - oracle::scalar_threshold(4, 8)) < 1e-4);
}

TEST_CASE("coupled thresholds") {
  const double th = bp_threshold(uniform_spec(3, 6, 3), 1e-4);
  CHECK(th > 0.46);
  CHECK(th < 0.5);
  CHECK(bp_threshold(spec_of(4, 8, {0.25, 0.25, 0.25, 0.25}), 1e-3) < 0.5);
}

}  // TEST_SUITE
