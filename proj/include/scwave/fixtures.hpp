#ifndef SCWAVE_FIXTURES_HPP
#define SCWAVE_FIXTURES_HPP

#include "scwave/ensemble.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scwave {

/// One row of the reference code table: optimized (NU) and uniform (Ref)
/// rate-1/2 codes for decoder setups A and B.
struct FixtureRow {
  std::string label;
  int w = 0;
  int dv = 0;
  /// Design erasure probability (NU rows only).
  std::optional<double> epsilon;
  std::vector<double> nu;
  /// Listed design rate at L = 100.
  double rate = 0.0;

  bool optimized() const { return label.rfind("NU", 0) == 0; }
  /// 'A' or 'B', the last character of the label.
  char setup() const { return label.empty() ? '?' : label.back(); }
  int dc() const { return 2 * dv; }
};

struct FixtureTable {
  std::vector<FixtureRow> rows;

  static std::filesystem::path default_path();
  static FixtureTable load(const std::filesystem::path& path = default_path());

  const FixtureRow& find(const std::string& label) const;
  /// The uniform reference row with the same w and setup as `row`.
  const FixtureRow& reference_for(const FixtureRow& row) const;
};

EnsembleConfig fixture_config(const FixtureRow& row, int L = 100, int M = 8000);
EnsembleSpec fixture_spec(const FixtureRow& row, int L = 100, int M = 8000);

struct FixtureCheck {
  std::string label;
  double expected = 0.0;
  double computed = 0.0;
  bool ok = false;
  std::string problem;
};

/// Recomputes every row's design rate at L = 100 and compares within `tol`.
std::vector<FixtureCheck> check_fixture_rates(const FixtureTable& table, double tol = 1e-5);

}  // namespace scwave

#endif  // SCWAVE_FIXTURES_HPP
