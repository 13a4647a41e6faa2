#ifndef SCWAVE_DECODER_HPP
#define SCWAVE_DECODER_HPP

#include "scwave/code_graph.hpp"
#include "scwave/ensemble.hpp"
#include "scwave/parallel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace scwave {

/// Sliding-window schedule: `window` variable positions, `iterations`
/// flooding iterations per window position.
struct DecoderSetup {
  int window = 15;
  int iterations = 1;
  std::string label = "custom";

  /// W_D = 5w, I = 1.
  static DecoderSetup setup_a(int w);
  /// Defined for w = 3 (15, 5) and w = 8 (40, 2) only.
  static DecoderSetup setup_b(int w);
  /// "A", "B" or "WD,I".
  static DecoderSetup parse(const std::string& s, int w);

  int effective_iterations() const { return window * iterations; }
  void validate(int w) const;
};

enum class ChannelKind { bec, biawgn };

struct ChannelModel {
  ChannelKind kind = ChannelKind::bec;
  double epsilon = 0.0;  // BEC erasure probability
  double sigma = 1.0;    // BI-AWGN noise standard deviation

  static ChannelModel bec(double epsilon);
  static ChannelModel biawgn(double sigma);
  /// sigma^2 = 1 / (2 R 10^{EbN0/10}).
  static ChannelModel biawgn_ebn0(double ebn0_db, double rate);
};

/// Channel output for the all-zero codeword. BEC: `erased` flags and hard
/// `bits` of the unerased positions. BI-AWGN: `llr` = 2y/sigma^2 with the
/// codeword mapped to +1.
struct ReceivedWord {
  ChannelKind kind = ChannelKind::bec;
  std::vector<std::uint8_t> erased;
  std::vector<std::uint8_t> bits;
  std::vector<double> llr;
};

ReceivedWord transmit(const CodeGraph& graph, const ChannelModel& channel, Rng& rng);

struct DecodeResult {
  std::vector<std::uint8_t> bits;
  /// BEC: bit was recovered. BI-AWGN: always 1.
  std::vector<std::uint8_t> resolved;
  int unresolved = 0;
  /// BEC only: cumulative recovered count after every iteration performed.
  std::vector<int> resolved_trace;
};

/// Windowed BP decoder with buffers sized for one graph.
///
/// The window covers the variables of W_D consecutive positions plus every
/// check attached to them. It enters the chain from the left: its first
/// placement holds position 0 alone as its rightmost position, so every
/// position spends W_D placements in the window. After I flooding iterations
/// (fewer if nothing changes) the leftmost position is final and the window
/// moves one position on. Finalized variables feed the window with frozen
/// values; variables right of the window feed their channel values.
class WindowedDecoder {
 public:
  WindowedDecoder(const CodeGraph& graph, DecoderSetup setup);

  DecodeResult decode(const ReceivedWord& received);

 private:
  DecodeResult decode_bec(const ReceivedWord& received);
  DecodeResult decode_awgn(const ReceivedWord& received);

  const CodeGraph* graph_;
  DecoderSetup setup_;
  // BEC state
  std::vector<std::int32_t> unknown_count_;
  std::vector<std::int64_t> unknown_sum_;
  std::vector<std::uint8_t> parity_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  // BI-AWGN state
  std::vector<double> to_check_;
  std::vector<double> to_var_;
};

DecodeResult windowed_decode(const CodeGraph& graph, const ReceivedWord& received,
                             const DecoderSetup& setup);

/// True if every check sums to zero over `bits` (edges counted with multiplicity).
bool syndrome_ok(const CodeGraph& graph, const std::vector<std::uint8_t>& bits);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// 95% Wilson score interval for k successes in n trials.
WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

struct SimConfig {
  std::uint64_t min_frames = 1;
  std::uint64_t max_frames = 2000;
  /// Stop once this many frame errors are seen (and min_frames reached); 0 runs max_frames.
  std::uint64_t target_frame_errors = 100;
  /// Frames are simulated in fixed batches; stopping is checked between batches.
  std::uint64_t batch = 64;
  std::uint64_t seed = 1;
  int code_realizations = 1;
};

struct SimPoint {
  double param = 0.0;  // epsilon (BEC) or Eb/N0 in dB (BI-AWGN)
  std::uint64_t frames = 0;
  std::uint64_t frame_errors = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t erasures = 0;
  /// Frames reported fully recovered whose decoded word fails a check.
  std::uint64_t syndrome_failures = 0;
  double ber = 0.0;
  double fer = 0.0;
  WilsonInterval fer_ci;
  /// Unrecovered or wrong bits per variable position, summed over frames.
  std::vector<std::uint64_t> position_errors;
};

struct SimReport {
  ChannelKind channel = ChannelKind::bec;
  DecoderSetup setup;
  std::uint64_t bits_per_frame = 0;
  std::vector<SimPoint> points;
};

/// BER counts a remaining erasure as half an error: (bit_errors + erasures/2) / (frames n).
double bit_error_rate(std::uint64_t bit_errors, std::uint64_t erasures, std::uint64_t frames,
                      std::uint64_t n);

/// Monte-Carlo sweep over `grid` (epsilon for BEC, Eb/N0 dB for BI-AWGN).
/// Frame f at grid index g draws noise from stream (seed, g, f) and uses
/// code realization f mod code_realizations; results do not depend on the
/// worker count.
SimReport run_sweep(const EnsembleSpec& spec, ChannelKind channel, const std::vector<double>& grid,
                    const DecoderSetup& setup, const SimConfig& config);

/// Same, on already sampled graphs.
SimReport run_sweep(const std::vector<CodeGraph>& codes, double rate, ChannelKind channel,
                    const std::vector<double>& grid, const DecoderSetup& setup,
                    const SimConfig& config);

}  // namespace scwave

#endif  // SCWAVE_DECODER_HPP
