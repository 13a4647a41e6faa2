#ifndef SCWAVE_IO_HPP
#define SCWAVE_IO_HPP

#include "scwave/decoder.hpp"
#include "scwave/ensemble.hpp"
#include "scwave/optimizer.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace scwave {

using json = nlohmann::ordered_json;

// Ensemble files: {"dv": int, "dc": int, "L": int, "M": int, "nu": [floats]}
json to_json(const EnsembleConfig& c);
EnsembleConfig ensemble_from_json(const json& j);
EnsembleConfig read_ensemble(const std::filesystem::path& path);

/// "a:b:step", inclusive of b up to rounding; a single number is a one-point grid.
std::vector<double> parse_grid(const std::string& s);
/// "3..10", "3,4,5" or "4".
std::vector<int> parse_int_list(const std::string& s);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

struct RunManifest {
  std::string subcommand;
  json config = json::object();
  std::uint64_t seed = 0;
  bool seed_generated = false;
  std::string version = SCWAVE_VERSION;
  std::string timestamp;

  json to_json() const;
};

std::string utc_timestamp();
/// Path of the manifest written next to a CSV output.
std::filesystem::path manifest_path(const std::filesystem::path& output);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// Plain comma-separated text, no quoting.
CsvTable parse_csv(const std::string& text);

struct SpeedRow {
  std::string series;
  double epsilon = 0.0;
  int dv = 0;
  int dc = 0;
  int w = 0;
  double speed = 0.0;
  int iterations = 0;
  bool feasible = false;
};

/// Long format: epsilon, dv, dc, w, speed, iterations, feasible, series.
std::string speed_csv(const std::vector<SpeedRow>& rows);
std::vector<SpeedRow> parse_speed_csv(const std::string& text);
/// Companion data: {"series": [{"name", "dv", "dc", "w", "epsilon": [], "speed": [], ...}]}.
json speed_series_json(const std::vector<SpeedRow>& rows);

/// param, frames, frame_errors, bit_errors, erasures, BER, FER, ci_low, ci_high
std::string sim_csv(const SimReport& report);
std::string trace_csv(const std::vector<double>& best_costs);
/// t, z, x with z 1-based.
std::string profiles_csv(const std::vector<Vector>& profiles);

json to_json(const DegreeResult& r, double epsilon);

}  // namespace scwave

#endif  // SCWAVE_IO_HPP
