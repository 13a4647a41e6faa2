#include "scwave/decoder.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace scwave;

namespace {

EnsembleSpec spec_of(int dv, int dc, std::vector<double> nu, int L, int M) {
  EnsembleConfig c;
  c.dv = dv;
  c.dc = dc;
  c.nu = std::move(nu);
  c.L = L;
  c.M = M;
  return make_spec(c, Usage::finite_length);
}

const std::vector<double> kThird(3, 1.0 / 3);

ReceivedWord erase(const std::vector<std::uint8_t>& word, double eps, std::mt19937& gen) {
  std::bernoulli_distribution coin(eps);
  ReceivedWord r;
  r.kind = ChannelKind::bec;
  r.bits = word;
  r.erased.resize(word.size());
  for (std::size_t v = 0; v < word.size(); ++v) {
    r.erased[v] = coin(gen);
    if (r.erased[v]) r.bits[v] = 0;
  }
  return r;
}

struct ThreadGuard {
  explicit ThreadGuard(int n) { set_worker_threads(n); }
  ~ThreadGuard() { set_worker_threads(0); }
};

}  // namespace

TEST_SUITE("decoder_sim") {

TEST_CASE("decoder setups") {
  const auto a = DecoderSetup::setup_a(3);
  CHECK(a.window == 15);
  CHECK(a.iterations == 1);
  CHECK(DecoderSetup::setup_a(8).window == 40);
  CHECK(DecoderSetup::setup_b(3).window == 15);
  CHECK(DecoderSetup::setup_b(3).iterations == 5);
  CHECK(DecoderSetup::setup_b(8).effective_iterations() == 80);
  CHECK_THROWS_AS(DecoderSetup::setup_b(5), std::invalid_argument);
  const auto c = DecoderSetup::parse("12,3", 3);
  CHECK(c.window == 12);
  CHECK(c.iterations == 3);
  CHECK(DecoderSetup::parse("B", 8).iterations == 2);
  CHECK_THROWS(DecoderSetup::parse("Q", 3));
  CHECK_THROWS(DecoderSetup{2, 1, "x"}.validate(3));
  CHECK_THROWS(DecoderSetup{6, 0, "x"}.validate(3));
}

TEST_CASE("channel extremes") {
  const auto g = sample_code(spec_of(3, 6, kThird, 10, 40), 1);
  Rng rng(1);
  const auto clean = transmit(g, ChannelModel::bec(0.0), rng);
  CHECK(std::count(clean.erased.begin(), clean.erased.end(), 1) == 0);
  const auto res = windowed_decode(g, clean, DecoderSetup::setup_a(3));
  CHECK(res.unresolved == 0);
  const auto dark = transmit(g, ChannelModel::bec(1.0), rng);
  CHECK(std::count(dark.erased.begin(), dark.erased.end(), 1) == g.num_variables());
  // only degree-one boundary checks can pin anything down
  const auto res1 = windowed_decode(g, dark, DecoderSetup::setup_a(3));
  CHECK(res1.unresolved > 0.9 * g.num_variables());
  CHECK(std::count(res1.bits.begin(), res1.bits.end(), 1) == 0);
  CHECK_THROWS(ChannelModel::bec(1.5));
  CHECK_THROWS(ChannelModel::biawgn(0.0));
}

TEST_CASE("erasure fraction") {
  const auto g = sample_code(spec_of(3, 6, {1.0}, 100, 1000), 2);
  Rng rng = make_stream(3, {1});
  const auto rx = transmit(g, ChannelModel::bec(0.46), rng);
  const double n = g.num_variables();
  const double frac = std::count(rx.erased.begin(), rx.erased.end(), 1) / n;
  CHECK(std::abs(frac - 0.46) < 3.0 * std::sqrt(0.46 * 0.54 / n));
}

TEST_CASE("nonzero codewords are recovered") {
  const auto g = sample_code(spec_of(3, 6, kThird, 10, 20), 5);
  oracle::BitMatrix H(static_cast<std::size_t>(g.num_checks()), std::vector<std::uint8_t>(static_cast<std::size_t>(g.num_variables()), 0));
  for (int v = 0; v < g.num_variables(); ++v)
    for (auto c : g.check_neighbors(v)) H[static_cast<std::size_t>(c)][static_cast<std::size_t>(v)] ^= 1;
  std::mt19937 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_codeword(H, g.num_variables(), gen);
    REQUIRE(oracle::in_null_space(H, x));
    REQUIRE(syndrome_ok(g, x));
    const auto rx = erase(x, 0.3, gen);
    const auto res = windowed_decode(g, rx, DecoderSetup::setup_a(3));
    for (int v = 0; v < g.num_variables(); ++v)
      if (res.resolved[static_cast<std::size_t>(v)]) REQUIRE(res.bits[static_cast<std::size_t>(v)] == x[static_cast<std::size_t>(v)]);
    if (res.unresolved == 0) CHECK(syndrome_ok(g, res.bits));
  }
}

TEST_CASE("syndrome detects a flipped bit") {
  const auto g = sample_code(spec_of(3, 6, kThird, 10, 20), 5);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(g.num_variables()), 0);
  CHECK(syndrome_ok(g, bits));
  for (int v = 0; v < g.num_variables(); ++v) {
    const auto nb = g.check_neighbors(v);
    if (nb[0] != nb[1] && nb[1] != nb[2] && nb[0] != nb[2]) {
      bits[static_cast<std::size_t>(v)] = 1;
      break;
    }
  }
  CHECK_FALSE(syndrome_ok(g, bits));
}

TEST_CASE("windowed peeling stays inside full peeling") {
  // Full-chain peeling recovers the largest possible set; a window can only recover less.
  const auto g = sample_code(spec_of(3, 6, kThird, 30, 60), 11);
  const DecoderSetup full{30, 10000, "full"};
  for (std::uint64_t f = 0; f < 30; ++f) {
    Rng rng = make_stream(12, {f});
    const auto rx = transmit(g, ChannelModel::bec(0.45), rng);
    const auto a = windowed_decode(g, rx, full);
    for (const auto& setup : {DecoderSetup::setup_a(3), DecoderSetup::setup_b(3), DecoderSetup{4, 1, "narrow"}}) {
      const auto b = windowed_decode(g, rx, setup);
      CHECK(b.unresolved >= a.unresolved);
      for (std::size_t v = 0; v < b.resolved.size(); ++v)
        if (b.resolved[v]) REQUIRE(a.resolved[v]);
    }
  }
}

TEST_CASE("wider windows do better on average") {
  const auto g = sample_code(spec_of(3, 6, kThird, 30, 100), 13);
  long narrow = 0, wide = 0;
  for (std::uint64_t f = 0; f < 40; ++f) {
    Rng rng = make_stream(14, {f});
    const auto rx = transmit(g, ChannelModel::bec(0.44), rng);
    narrow += windowed_decode(g, rx, DecoderSetup{4, 1, "narrow"}).unresolved;
    wide += windowed_decode(g, rx, DecoderSetup{15, 1, "wide"}).unresolved;
  }
  CHECK(wide <= narrow);
}

TEST_CASE("recovery trace is cumulative") {
  const auto g = sample_code(spec_of(3, 6, kThird, 20, 50), 3);
  Rng rng(4);
  const auto rx = transmit(g, ChannelModel::bec(0.4), rng);
  const auto res = windowed_decode(g, rx, DecoderSetup::setup_b(3));
  REQUIRE_FALSE(res.resolved_trace.empty());
  for (std::size_t k = 1; k < res.resolved_trace.size(); ++k) CHECK(res.resolved_trace[k] >= res.resolved_trace[k - 1]);
  CHECK(res.resolved_trace.back() == g.num_variables() - res.unresolved);
}

TEST_CASE("mismatched received word") {
  const auto g = sample_code(spec_of(3, 6, kThird, 10, 20), 5);
  ReceivedWord r;
  r.erased.assign(3, 0);
  CHECK_THROWS_AS(windowed_decode(g, r, DecoderSetup::setup_a(3)), std::invalid_argument);
}

TEST_CASE("noise level from Eb/N0") {
  CHECK(ChannelModel::biawgn_ebn0(0.0, 0.5).sigma == doctest::Approx(1.0));
  CHECK(ChannelModel::biawgn_ebn0(3.0, 0.5).sigma == doctest::Approx(std::sqrt(1.0 / std::pow(10.0, 0.3))));
  CHECK_THROWS(ChannelModel::biawgn_ebn0(1.0, 0.0));
}

TEST_CASE("sum-product decoding at high SNR") {
  const auto g = sample_code(spec_of(3, 6, kThird, 20, 100), 6);
  for (std::uint64_t f = 0; f < 5; ++f) {
    Rng rng = make_stream(15, {f});
    const auto rx = transmit(g, ChannelModel::biawgn_ebn0(5.0, 0.5), rng);
    const auto res = windowed_decode(g, rx, DecoderSetup::setup_a(3));
    CHECK(std::count(res.bits.begin(), res.bits.end(), 1) == 0);
    CHECK(syndrome_ok(g, res.bits));
  }
  // Very noisy: the decoder still runs and reports hard decisions.
  Rng rng(16);
  const auto rx = transmit(g, ChannelModel::biawgn(3.0), rng);
  const auto res = windowed_decode(g, rx, DecoderSetup::setup_a(3));
  CHECK(res.bits.size() == static_cast<std::size_t>(g.num_variables()));
  CHECK(std::count(res.bits.begin(), res.bits.end(), 1) > 0);
}

TEST_CASE("Wilson interval") {
  const auto a = wilson_interval(0, 100);
  CHECK(a.low == 0.0);
  CHECK(wilson_interval(7, 7).high == 1.0);
  CHECK(a.high == doctest::Approx(0.03699).epsilon(1e-3));
  const auto b = wilson_interval(50, 100);
  CHECK(b.low == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(b.high == doctest::Approx(0.59617).epsilon(1e-4));
  const auto c = wilson_interval(0, 0);
  CHECK(c.low == 0.0);
  CHECK(c.high == 1.0);
}

TEST_CASE("bit error rate counts erasures as half errors") {
  CHECK(bit_error_rate(10, 4, 2, 100) == doctest::Approx(0.06));
  CHECK(bit_error_rate(0, 0, 0, 100) == 0.0);
}

TEST_CASE("sweep bookkeeping") {
  const auto spec = spec_of(3, 6, kThird, 20, 60);
  SimConfig cfg;
  cfg.max_frames = 200;
  cfg.target_frame_errors = 20;
  cfg.batch = 16;
  cfg.seed = 3;
  const auto rep = run_sweep(spec, ChannelKind::bec, {0.0, 0.47}, DecoderSetup::setup_a(3), cfg);
  REQUIRE(rep.points.size() == 2);
  CHECK(rep.bits_per_frame == 1200);
  for (const auto& p : rep.points) {
    CHECK(p.frames <= cfg.max_frames);
    CHECK(p.frame_errors <= p.frames);
    CHECK(p.ber <= p.fer);
    CHECK(p.syndrome_failures == 0);
    std::uint64_t pos = 0;
    for (auto e : p.position_errors) pos += e;
    CHECK(pos == p.bit_errors + p.erasures);
    CHECK(p.fer_ci.low <= p.fer);
    CHECK(p.fer <= p.fer_ci.high);
  }
  CHECK(rep.points[0].frames == 200);
  CHECK(rep.points[0].frame_errors == 0);
  // early stop lands on a batch boundary
  CHECK(rep.points[1].frame_errors >= 20);
  CHECK(rep.points[1].frames % 16 == 0);

  cfg.target_frame_errors = 0;
  cfg.max_frames = 40;
  const auto all = run_sweep(spec, ChannelKind::bec, {0.47}, DecoderSetup::setup_a(3), cfg);
  CHECK(all.points[0].frames == 40);
}

TEST_CASE("sweeps do not depend on the worker count") {
  const auto spec = spec_of(3, 6, kThird, 20, 60);
  SimConfig cfg;
  cfg.max_frames = 96;
  cfg.target_frame_errors = 0;
  cfg.batch = 16;
  cfg.code_realizations = 3;
  SimReport a, b;
  {
    ThreadGuard g(1);
    a = run_sweep(spec, ChannelKind::bec, {0.44, 0.46}, DecoderSetup::setup_b(3), cfg);
  }
  {
    ThreadGuard g(2);
    b = run_sweep(spec, ChannelKind::bec, {0.44, 0.46}, DecoderSetup::setup_b(3), cfg);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(a.points[k].frame_errors == b.points[k].frame_errors);
    CHECK(a.points[k].erasures == b.points[k].erasures);
    CHECK(a.points[k].position_errors == b.points[k].position_errors);
  }
}

}  // TEST_SUITE
