#ifndef SCWAVE_CODE_GRAPH_HPP
#define SCWAVE_CODE_GRAPH_HPP

#include "scwave/ensemble.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace scwave {

/// A finite-length Tanner graph sampled from a coupled ensemble.
///
/// Variable node v sits at spatial position v / M (0-based); check node c at
/// c / (M dv / dc), over L + w - 1 check positions. Multi-edges are kept.
class CodeGraph {
 public:
  CodeGraph() = default;
  CodeGraph(int L, int M, int w, int dv, int checks_per_position,
            std::vector<std::int32_t> vn_adjacency, std::uint64_t seed = 0);

  int num_variables() const { return L_ * M_; }
  int num_checks() const { return (L_ + w_ - 1) * checks_per_position_; }
  int positions() const { return L_; }
  int check_positions() const { return L_ + w_ - 1; }
  int variables_per_position() const { return M_; }
  int checks_per_position() const { return checks_per_position_; }
  int coupling_width() const { return w_; }
  int variable_degree() const { return dv_; }
  std::uint64_t seed() const { return seed_; }

  int variable_position(int v) const { return v / M_; }
  int check_position(int c) const { return c / checks_per_position_; }

  /// The dv check neighbours of v, in edge order.
  std::span<const std::int32_t> check_neighbors(int v) const {
    return {vn_adj_.data() + static_cast<std::size_t>(v) * dv_, static_cast<std::size_t>(dv_)};
  }
  /// Variable neighbours of c, one entry per edge.
  std::span<const std::int32_t> variable_neighbors(int c) const {
    return {cn_adj_.data() + cn_offsets_[c], cn_offsets_[c + 1] - cn_offsets_[c]};
  }
  /// Edge ids (v * dv + k) of the edges at check c, aligned with variable_neighbors(c).
  std::span<const std::int32_t> check_edges(int c) const {
    return {cn_edges_.data() + cn_offsets_[c], cn_offsets_[c + 1] - cn_offsets_[c]};
  }
  int check_degree(int c) const { return static_cast<int>(cn_offsets_[c + 1] - cn_offsets_[c]); }
  std::size_t num_edges() const { return vn_adj_.size(); }

  /// Edges that repeat an earlier (v, c) pair.
  std::size_t multi_edge_count() const;

  const std::vector<std::int32_t>& vn_adjacency() const { return vn_adj_; }

 private:
  int L_ = 0;
  int M_ = 0;
  int w_ = 1;
  int dv_ = 0;
  int checks_per_position_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::int32_t> vn_adj_;
  std::vector<std::size_t> cn_offsets_;
  std::vector<std::int32_t> cn_adj_;
  std::vector<std::int32_t> cn_edges_;
};

/// Per-position edge counts c_{z,i} = round(M dv nu_i) by largest-remainder
/// apportionment, so that sum_i c_{z,i} = M dv exactly.
std::vector<int> offset_counts(const SmoothingProfile& profile, int edges_per_position);

/// Samples a graph: offsets are apportioned per variable position, shuffled
/// over the position's edges, and every check position's incoming edges are
/// matched to a uniformly random subset of its M dv sockets.
CodeGraph sample_code(const EnsembleSpec& spec, std::uint64_t seed);

/// 1 - (checks with at least one edge) / n.
double realized_rate(const CodeGraph& graph);

/// Number of edges from variable position z (0-based) at each offset.
std::vector<std::vector<std::int64_t>> edge_type_counts(const CodeGraph& graph);

/// Parity-check matrix in alist form: rows are checks, columns variables.
struct AlistMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> col_entries;  // 0-based row indices per column
  std::vector<std::vector<int>> row_entries;  // 0-based column indices per row
};

/// Collapses multi-edges (alist cannot express them). `collapsed` receives the number dropped.
AlistMatrix to_alist(const CodeGraph& graph, std::size_t* collapsed = nullptr);

void write_alist(std::ostream& os, const AlistMatrix& m);
AlistMatrix read_alist(std::istream& is);

/// Writes `graph` to `path` in alist format; returns the number of collapsed multi-edges.
std::size_t export_alist(const CodeGraph& graph, const std::filesystem::path& path);
AlistMatrix import_alist(const std::filesystem::path& path);

}  // namespace scwave

#endif  // SCWAVE_CODE_GRAPH_HPP
