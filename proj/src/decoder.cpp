#include "scwave/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace scwave {

namespace {
constexpr double kLlrClamp = 30.0;
constexpr double kSettleTolerance = 1e-12;
}  // namespace

DecoderSetup DecoderSetup::setup_a(int w) { return {5 * w, 1, "A"}; }

DecoderSetup DecoderSetup::setup_b(int w) {
  if (w == 3) return {15, 5, "B"};
  if (w == 8) return {40, 2, "B"};
  throw std::invalid_argument("decoder setup B is only defined for w = 3 and w = 8");
}

DecoderSetup DecoderSetup::parse(const std::string& s, int w) {
  if (s == "A" || s == "a") return setup_a(w);
  if (s == "B" || s == "b") return setup_b(w);
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("decoder setup must be A, B or WD,I (got '" + s + "')");
  DecoderSetup d;
  d.window = std::stoi(s.substr(0, comma));
  d.iterations = std::stoi(s.substr(comma + 1));
  d.label = "custom";
  return d;
}

void DecoderSetup::validate(int w) const {
  if (iterations < 1) throw std::invalid_argument("decoder needs at least one iteration per window");
  if (window < w) throw std::invalid_argument("window must span at least w positions");
}

ChannelModel ChannelModel::bec(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("erasure probability must lie in [0, 1]");
  ChannelModel c;
  c.kind = ChannelKind::bec;
  c.epsilon = epsilon;
  return c;
}

ChannelModel ChannelModel::biawgn(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("noise standard deviation must be positive");
  ChannelModel c;
  c.kind = ChannelKind::biawgn;
  c.sigma = sigma;
  return c;
}

ChannelModel ChannelModel::biawgn_ebn0(double ebn0_db, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("code rate must be positive");
  return biawgn(std::sqrt(1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0))));
}

ReceivedWord transmit(const CodeGraph& graph, const ChannelModel& channel, Rng& rng) {
  const auto n = static_cast<std::size_t>(graph.num_variables());
  ReceivedWord r;
  r.kind = channel.kind;
  if (channel.kind == ChannelKind::bec) {
    r.erased.resize(n);
    r.bits.assign(n, 0);
    for (auto& e : r.erased) e = uniform01(rng) < channel.epsilon;
  } else {
    r.llr.resize(n);
    std::normal_distribution<double> noise(0.0, channel.sigma);
    const double scale = 2.0 / (channel.sigma * channel.sigma);
    for (auto& l : r.llr) l = scale * (1.0 + noise(rng));
  }
  return r;
}

WindowedDecoder::WindowedDecoder(const CodeGraph& graph, DecoderSetup setup)
    : graph_(&graph), setup_(std::move(setup)) {
  setup_.validate(graph.coupling_width());
}

DecodeResult WindowedDecoder::decode(const ReceivedWord& received) {
  if (received.kind == ChannelKind::bec) {
    if (received.erased.size() != static_cast<std::size_t>(graph_->num_variables()))
      throw std::invalid_argument("received word length does not match the code");
    return decode_bec(received);
  }
  if (received.llr.size() != static_cast<std::size_t>(graph_->num_variables()))
    throw std::invalid_argument("received word length does not match the code");
  return decode_awgn(received);
}

DecodeResult WindowedDecoder::decode_bec(const ReceivedWord& rx) {
  const CodeGraph& g = *graph_;
  const int n = g.num_variables();
  const int m = g.num_checks();
  const int L = g.positions();
  const int M = g.variables_per_position();

  DecodeResult out;
  out.resolved.resize(static_cast<std::size_t>(n));
  out.bits.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    out.resolved[v] = !rx.erased[v];
    out.bits[v] = rx.erased[v] ? 0 : rx.bits[v];
  }
  unknown_count_.assign(static_cast<std::size_t>(m), 0);
  unknown_sum_.assign(static_cast<std::size_t>(m), 0);
  parity_.assign(static_cast<std::size_t>(m), 0);
  if (stamp_.size() != static_cast<std::size_t>(m)) stamp_.assign(static_cast<std::size_t>(m), 0);
  for (int c = 0; c < m; ++c) {
    for (auto v : g.variable_neighbors(c)) {
      if (out.resolved[v]) {
        parity_[c] ^= out.bits[v];
      } else {
        ++unknown_count_[c];
        unknown_sum_[c] += v;
      }
    }
  }
  int recovered = static_cast<int>(std::count(out.resolved.begin(), out.resolved.end(), 1));

  // Checks with a single unknown neighbour; stamp_ marks membership.
  std::vector<std::int32_t> active;
  std::vector<std::int32_t> next;
  std::vector<std::pair<std::int32_t, std::uint8_t>> updates;
  auto new_epoch = [&] {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  };
  new_epoch();
  auto push = [&](std::vector<std::int32_t>& list, std::int32_t c) {
    if (unknown_count_[c] == 1 && stamp_[c] != epoch_) {
      stamp_[c] = epoch_;
      list.push_back(c);
    }
  };
  auto admit_position = [&](int p) {
    for (int v = p * M; v < (p + 1) * M; ++v)
      for (auto c : g.check_neighbors(v)) push(active, c);
  };

  // The window slides in from the left, so SP s is the oldest position for
  // window start s and every SP sees window * iterations updates.
  const int W = setup_.window;
  for (int s = 1 - W; s < L; ++s) {
    const int last = std::min(L - 1, s + W - 1);
    if (s + W - 1 <= L - 1) admit_position(last);
    const std::int64_t lo = static_cast<std::int64_t>(std::max(s, 0)) * M;
    const std::int64_t hi = static_cast<std::int64_t>(last + 1) * M;
    for (int it = 0; it < setup_.iterations && !active.empty(); ++it) {
      updates.clear();
      for (auto c : active) {
        if (unknown_count_[c] != 1) continue;
        const std::int64_t v = unknown_sum_[c];
        if (v >= lo && v < hi && !out.resolved[v]) updates.emplace_back(static_cast<std::int32_t>(v), parity_[c]);
      }
      active.clear();
      new_epoch();
      for (auto [v, bit] : updates) {
        if (out.resolved[v]) continue;
        out.resolved[v] = 1;
        out.bits[v] = bit;
        ++recovered;
        for (auto c : g.check_neighbors(v)) {
          --unknown_count_[c];
          unknown_sum_[c] -= v;
          parity_[c] ^= bit;
          push(active, c);
        }
      }
      out.resolved_trace.push_back(recovered);
    }
  }
  out.unresolved = n - recovered;
  return out;
}

DecodeResult WindowedDecoder::decode_awgn(const ReceivedWord& rx) {
  const CodeGraph& g = *graph_;
  const int n = g.num_variables();
  const int L = g.positions();
  const int M = g.variables_per_position();
  const int Mc = g.checks_per_position();
  const int dv = g.variable_degree();
  const int w = g.coupling_width();
  const std::size_t E = g.num_edges();

  auto clamp = [](double x) { return std::clamp(x, -kLlrClamp, kLlrClamp); };
  to_check_.resize(E);
  to_var_.assign(E, 0.0);
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < dv; ++k) to_check_[static_cast<std::size_t>(v) * dv + k] = clamp(rx.llr[v]);

  DecodeResult out;
  out.bits.assign(static_cast<std::size_t>(n), 0);
  out.resolved.assign(static_cast<std::size_t>(n), 1);
  std::vector<double> t, prefix, suffix;

  auto total_llr = [&](int v) {
    double s = rx.llr[v];
    for (int k = 0; k < dv; ++k) s += to_var_[static_cast<std::size_t>(v) * dv + k];
    return s;
  };

  const int W = setup_.window;
  for (int s = 1 - W; s < L; ++s) {
    const int first = std::max(s, 0);
    const int last = std::min(L - 1, s + W - 1);
    const int c_lo = first * Mc;
    const int c_hi = std::min(last + w - 1, g.check_positions() - 1) * Mc + Mc;
    for (int it = 0; it < setup_.iterations; ++it) {
      double change = 0.0;
      for (int c = c_lo; c < c_hi; ++c) {
        const auto edges = g.check_edges(c);
        const std::size_t d = edges.size();
        if (d == 0) continue;
        t.resize(d);
        prefix.resize(d + 1);
        suffix.resize(d + 1);
        for (std::size_t k = 0; k < d; ++k) t[k] = std::tanh(0.5 * to_check_[static_cast<std::size_t>(edges[k])]);
        prefix[0] = 1.0;
        suffix[d] = 1.0;
        for (std::size_t k = 0; k < d; ++k) prefix[k + 1] = prefix[k] * t[k];
        for (std::size_t k = d; k > 0; --k) suffix[k - 1] = suffix[k] * t[k - 1];
        for (std::size_t k = 0; k < d; ++k) {
          const double p = std::clamp(prefix[k] * suffix[k + 1], -1.0 + 1e-15, 1.0 - 1e-15);
          const double msg = clamp(2.0 * std::atanh(p));
          auto& slot = to_var_[static_cast<std::size_t>(edges[k])];
          change = std::max(change, std::abs(msg - slot));
          slot = msg;
        }
      }
      for (int v = first * M; v < (last + 1) * M; ++v) {
        const double total = total_llr(v);
        for (int k = 0; k < dv; ++k) {
          const std::size_t e = static_cast<std::size_t>(v) * dv + k;
          to_check_[e] = clamp(total - to_var_[e]);
        }
      }
      if (change < kSettleTolerance) break;
    }
    if (s < 0) continue;
    for (int v = s * M; v < (s + 1) * M; ++v) {
      const double total = total_llr(v);
      out.bits[v] = total < 0.0;
      for (int k = 0; k < dv; ++k) to_check_[static_cast<std::size_t>(v) * dv + k] = clamp(total);
    }
  }
  return out;
}

DecodeResult windowed_decode(const CodeGraph& graph, const ReceivedWord& received,
                             const DecoderSetup& setup) {
  WindowedDecoder decoder(graph, setup);
  return decoder.decode(received);
}

bool syndrome_ok(const CodeGraph& graph, const std::vector<std::uint8_t>& bits) {
  for (int c = 0; c < graph.num_checks(); ++c) {
    std::uint8_t p = 0;
    for (auto v : graph.variable_neighbors(c)) p ^= bits[v];
    if (p) return false;
  }
  return true;
}

WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // the exact bounds at k = 0 and k = n are 0 and 1; avoid rounding residue
  return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

double bit_error_rate(std::uint64_t bit_errors, std::uint64_t erasures, std::uint64_t frames,
                      std::uint64_t n) {
  if (frames == 0 || n == 0) return 0.0;
  return (static_cast<double>(bit_errors) + 0.5 * static_cast<double>(erasures)) /
         (static_cast<double>(frames) * static_cast<double>(n));
}

namespace {

struct FrameOutcome {
  bool frame_error = false;
  bool syndrome_failure = false;
  std::uint64_t bit_errors = 0;
  std::uint64_t erasures = 0;
  std::vector<std::uint32_t> positions;  // erroneous variable positions
};

}  // namespace

SimReport run_sweep(const std::vector<CodeGraph>& codes, double rate, ChannelKind channel,
                    const std::vector<double>& grid, const DecoderSetup& setup,
                    const SimConfig& config) {
  if (codes.empty()) throw std::invalid_argument("simulation needs at least one code");
  if (config.max_frames < 1 || config.batch < 1) throw std::invalid_argument("frames and batch must be >= 1");
  for (const auto& g : codes) setup.validate(g.coupling_width());

  SimReport report;
  report.channel = channel;
  report.setup = setup;
  report.bits_per_frame = static_cast<std::uint64_t>(codes.front().num_variables());

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double param = grid[gi];
    const ChannelModel model = channel == ChannelKind::bec ? ChannelModel::bec(param)
                                                           : ChannelModel::biawgn_ebn0(param, rate);
    SimPoint pt;
    pt.param = param;
    pt.position_errors.assign(static_cast<std::size_t>(codes.front().positions()), 0);

    std::vector<FrameOutcome> outcomes;
    while (pt.frames < config.max_frames) {
      const std::uint64_t count = std::min(config.batch, config.max_frames - pt.frames);
      outcomes.assign(count, {});
      const std::uint64_t first = pt.frames;
      parallel_for(count, [&](std::size_t k) {
        const std::uint64_t frame = first + k;
        const CodeGraph& code = codes[frame % codes.size()];
        Rng rng = make_stream(config.seed, {static_cast<std::uint64_t>(gi), frame, 0x6672ULL});
        const auto rx = transmit(code, model, rng);
        WindowedDecoder decoder(code, setup);
        const auto res = decoder.decode(rx);
        auto& o = outcomes[k];
        for (std::size_t v = 0; v < res.bits.size(); ++v) {
          const bool erased = !res.resolved[v];
          const bool wrong = res.resolved[v] && res.bits[v] != 0;
          if (erased) ++o.erasures;
          if (wrong) ++o.bit_errors;
          if (erased || wrong) o.positions.push_back(static_cast<std::uint32_t>(code.variable_position(static_cast<int>(v))));
        }
        o.frame_error = o.erasures + o.bit_errors > 0;
        if (channel == ChannelKind::bec && res.unresolved == 0) o.syndrome_failure = !syndrome_ok(code, res.bits);
      });
      for (const auto& o : outcomes) {
        ++pt.frames;
        pt.frame_errors += o.frame_error;
        pt.bit_errors += o.bit_errors;
        pt.erasures += o.erasures;
        pt.syndrome_failures += o.syndrome_failure;
        for (auto p : o.positions) ++pt.position_errors[p];
      }
      if (config.target_frame_errors > 0 && pt.frames >= config.min_frames &&
          pt.frame_errors >= config.target_frame_errors)
        break;
    }
    pt.ber = bit_error_rate(pt.bit_errors, pt.erasures, pt.frames, report.bits_per_frame);
    pt.fer = static_cast<double>(pt.frame_errors) / static_cast<double>(pt.frames);
    pt.fer_ci = wilson_interval(pt.frame_errors, pt.frames);
    report.points.push_back(std::move(pt));
  }
  return report;
}

SimReport run_sweep(const EnsembleSpec& spec, ChannelKind channel, const std::vector<double>& grid,
                    const DecoderSetup& setup, const SimConfig& config) {
  if (config.code_realizations < 1) throw std::invalid_argument("need at least one code realization");
  std::vector<CodeGraph> codes;
  for (int k = 0; k < config.code_realizations; ++k)
    codes.push_back(sample_code(spec, derive_seed(config.seed, {0x636f6465ULL, static_cast<std::uint64_t>(k)})));
  return run_sweep(codes, design_rate(spec).design_rate, channel, grid, setup, config);
}

}  // namespace scwave
