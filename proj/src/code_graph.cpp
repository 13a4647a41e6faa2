#include "scwave/code_graph.hpp"

#include "scwave/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace scwave {

CodeGraph::CodeGraph(int L, int M, int w, int dv, int checks_per_position,
                     std::vector<std::int32_t> vn_adjacency, std::uint64_t seed)
    : L_(L), M_(M), w_(w), dv_(dv), checks_per_position_(checks_per_position), seed_(seed),
      vn_adj_(std::move(vn_adjacency)) {
  if (vn_adj_.size() != static_cast<std::size_t>(L) * M * dv)
    throw std::invalid_argument("adjacency size does not match L*M*dv");
  const int m = num_checks();
  std::vector<std::size_t> degree(static_cast<std::size_t>(m), 0);
  for (auto c : vn_adj_) {
    if (c < 0 || c >= m) throw std::invalid_argument("check index out of range");
    ++degree[static_cast<std::size_t>(c)];
  }
  cn_offsets_.assign(static_cast<std::size_t>(m) + 1, 0);
  std::partial_sum(degree.begin(), degree.end(), cn_offsets_.begin() + 1);
  cn_adj_.resize(vn_adj_.size());
  cn_edges_.resize(vn_adj_.size());
  std::vector<std::size_t> fill(cn_offsets_.begin(), cn_offsets_.end() - 1);
  for (std::size_t e = 0; e < vn_adj_.size(); ++e) {
    const auto c = static_cast<std::size_t>(vn_adj_[e]);
    cn_adj_[fill[c]] = static_cast<std::int32_t>(e / static_cast<std::size_t>(dv_));
    cn_edges_[fill[c]] = static_cast<std::int32_t>(e);
    ++fill[c];
  }
}

std::size_t CodeGraph::multi_edge_count() const {
  std::size_t repeats = 0;
  std::vector<std::int32_t> row(static_cast<std::size_t>(dv_));
  for (int v = 0; v < num_variables(); ++v) {
    const auto nb = check_neighbors(v);
    row.assign(nb.begin(), nb.end());
    std::sort(row.begin(), row.end());
    for (std::size_t k = 1; k < row.size(); ++k) repeats += row[k] == row[k - 1];
  }
  return repeats;
}

std::vector<int> offset_counts(const SmoothingProfile& profile, int edges_per_position) {
  const int w = profile.width();
  std::vector<int> counts(static_cast<std::size_t>(w));
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int i = 0; i < w; ++i) {
    const double exact = profile[i] * edges_per_position;
    const double base = std::floor(exact);
    counts[static_cast<std::size_t>(i)] = static_cast<int>(base);
    assigned += static_cast<int>(base);
    remainders.emplace_back(exact - base, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; assigned < edges_per_position; ++k, ++assigned)
    ++counts[static_cast<std::size_t>(remainders[static_cast<std::size_t>(k % w)].second)];
  return counts;
}

CodeGraph sample_code(const EnsembleSpec& spec, std::uint64_t seed) {
  const auto check = validate_spec(spec.config(), Usage::finite_length);
  if (!check) throw SpecError(check.message());

  const int L = spec.L;
  const int M = spec.M;
  const int w = spec.coupling_width();
  const int dv = spec.dv;
  const int dc = spec.dc;
  const int checks = spec.checks_per_position();
  const int per_position = M * dv;  // edges leaving a variable position = sockets at a check position

  Rng rng = make_stream(seed, {0x636f6465ULL});
  const auto counts = offset_counts(spec.profile, per_position);

  std::vector<std::vector<std::int32_t>> incoming(static_cast<std::size_t>(L + w - 1));
  std::vector<int> pattern;
  pattern.reserve(static_cast<std::size_t>(per_position));
  for (int z = 0; z < L; ++z) {
    pattern.clear();
    for (int i = 0; i < w; ++i) pattern.insert(pattern.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]), i);
    shuffle(pattern, rng);
    for (int k = 0; k < per_position; ++k) {
      const auto e = static_cast<std::int32_t>(z * per_position + k);
      incoming[static_cast<std::size_t>(z + pattern[static_cast<std::size_t>(k)])].push_back(e);
    }
  }

  std::vector<std::int32_t> adjacency(static_cast<std::size_t>(L) * per_position);
  std::vector<std::int32_t> sockets(static_cast<std::size_t>(per_position));
  for (int cz = 0; cz < L + w - 1; ++cz) {
    const auto& edges = incoming[static_cast<std::size_t>(cz)];
    if (edges.size() > sockets.size())
      throw SpecError("socket demand exceeds supply at check position " + std::to_string(cz));
    std::iota(sockets.begin(), sockets.end(), 0);
    shuffle(sockets, rng);
    for (std::size_t k = 0; k < edges.size(); ++k)
      adjacency[static_cast<std::size_t>(edges[k])] = cz * checks + sockets[k] / dc;
  }
  return CodeGraph(L, M, w, dv, checks, std::move(adjacency), seed);
}

double realized_rate(const CodeGraph& graph) {
  int connected = 0;
  for (int c = 0; c < graph.num_checks(); ++c) connected += graph.check_degree(c) > 0;
  return 1.0 - static_cast<double>(connected) / graph.num_variables();
}

std::vector<std::vector<std::int64_t>> edge_type_counts(const CodeGraph& graph) {
  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(graph.positions()),
      std::vector<std::int64_t>(static_cast<std::size_t>(graph.coupling_width()), 0));
  for (int v = 0; v < graph.num_variables(); ++v) {
    const int z = graph.variable_position(v);
    for (auto c : graph.check_neighbors(v)) {
      const int offset = graph.check_position(c) - z;
      if (offset < 0 || offset >= graph.coupling_width())
        throw std::logic_error("edge offset outside [0, w)");
      ++counts[static_cast<std::size_t>(z)][static_cast<std::size_t>(offset)];
    }
  }
  return counts;
}

AlistMatrix to_alist(const CodeGraph& graph, std::size_t* collapsed) {
  AlistMatrix m;
  m.rows = graph.num_checks();
  m.cols = graph.num_variables();
  m.col_entries.resize(static_cast<std::size_t>(m.cols));
  m.row_entries.resize(static_cast<std::size_t>(m.rows));
  std::size_t dropped = 0;
  for (int v = 0; v < m.cols; ++v) {
    auto& col = m.col_entries[static_cast<std::size_t>(v)];
    const auto nb = graph.check_neighbors(v);
    col.assign(nb.begin(), nb.end());
    std::sort(col.begin(), col.end());
    const auto end = std::unique(col.begin(), col.end());
    dropped += static_cast<std::size_t>(col.end() - end);
    col.erase(end, col.end());
    for (int c : col) m.row_entries[static_cast<std::size_t>(c)].push_back(v);
  }
  if (collapsed) *collapsed = dropped;
  return m;
}

void write_alist(std::ostream& os, const AlistMatrix& m) {
  auto max_size = [](const std::vector<std::vector<int>>& lists) {
    std::size_t n = 0;
    for (const auto& l : lists) n = std::max(n, l.size());
    return n;
  };
  const std::size_t max_col = max_size(m.col_entries);
  const std::size_t max_row = max_size(m.row_entries);
  os << m.cols << ' ' << m.rows << '\n' << max_col << ' ' << max_row << '\n';
  auto write_degrees = [&](const std::vector<std::vector<int>>& lists) {
    for (std::size_t i = 0; i < lists.size(); ++i) os << (i ? " " : "") << lists[i].size();
    os << '\n';
  };
  write_degrees(m.col_entries);
  write_degrees(m.row_entries);
  auto write_lists = [&](const std::vector<std::vector<int>>& lists, std::size_t width) {
    for (const auto& l : lists) {
      for (std::size_t k = 0; k < width; ++k) os << (k ? " " : "") << (k < l.size() ? l[k] + 1 : 0);
      os << '\n';
    }
  };
  write_lists(m.col_entries, max_col);
  write_lists(m.row_entries, max_row);
}

AlistMatrix read_alist(std::istream& is) {
  AlistMatrix m;
  std::size_t max_col = 0, max_row = 0;
  if (!(is >> m.cols >> m.rows >> max_col >> max_row) || m.cols < 0 || m.rows < 0)
    throw std::runtime_error("alist: malformed header");
  std::vector<std::size_t> col_deg(static_cast<std::size_t>(m.cols)), row_deg(static_cast<std::size_t>(m.rows));
  for (auto& d : col_deg)
    if (!(is >> d)) throw std::runtime_error("alist: truncated column degrees");
  for (auto& d : row_deg)
    if (!(is >> d)) throw std::runtime_error("alist: truncated row degrees");
  auto read_lists = [&](std::vector<std::vector<int>>& lists, const std::vector<std::size_t>& deg,
                        std::size_t width, int bound) {
    lists.resize(deg.size());
    for (std::size_t i = 0; i < deg.size(); ++i) {
      for (std::size_t k = 0; k < width; ++k) {
        int x = 0;
        if (!(is >> x)) throw std::runtime_error("alist: truncated index list");
        if (x == 0) continue;
        if (x < 0 || x > bound) throw std::runtime_error("alist: index out of range");
        lists[i].push_back(x - 1);
      }
      if (lists[i].size() != deg[i]) throw std::runtime_error("alist: degree mismatch");
    }
  };
  read_lists(m.col_entries, col_deg, max_col, m.rows);
  read_lists(m.row_entries, row_deg, max_row, m.cols);
  return m;
}

std::size_t export_alist(const CodeGraph& graph, const std::filesystem::path& path) {
  std::size_t collapsed = 0;
  const auto m = to_alist(graph, &collapsed);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    write_alist(os, m);
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return collapsed;
}

AlistMatrix import_alist(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_alist(is);
}

}  // namespace scwave
