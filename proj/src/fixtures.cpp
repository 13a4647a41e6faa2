#include "scwave/fixtures.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scwave {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool is_missing(const std::string& s) { return s.empty() || s == "---"; }

// Decimal or "p/q".
double parse_weight(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  const double num = std::stod(s.substr(0, slash));
  const double den = std::stod(s.substr(slash + 1));
  if (den == 0.0) throw std::runtime_error("zero denominator in '" + s + "'");
  return num / den;
}

}  // namespace

std::filesystem::path FixtureTable::default_path() {
  if (const char* dir = std::getenv("SCWAVE_DATA_DIR")) return std::filesystem::path(dir) / "table1.csv";
  return std::filesystem::path(SCWAVE_DATA_DIR) / "table1.csv";
}

FixtureTable FixtureTable::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open fixture table " + path.string());
  FixtureTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#' || line_no == 1) continue;
    const auto f = split(line, ',');
    if (f.size() != 13)
      throw std::runtime_error("fixture table line " + std::to_string(line_no) + ": expected 13 fields");
    try {
      FixtureRow row;
      row.label = f[0];
      row.w = std::stoi(f[1]);
      row.dv = std::stoi(f[2]);
      if (!is_missing(f[3])) row.epsilon = std::stod(f[3]);
      for (std::size_t k = 4; k < 12; ++k)
        if (!is_missing(f[k])) row.nu.push_back(parse_weight(f[k]));
      row.rate = std::stod(f[12]);
      if (static_cast<int>(row.nu.size()) != row.w)
        throw std::runtime_error("profile length does not match w");
      table.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      throw std::runtime_error("fixture table line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

const FixtureRow& FixtureTable::find(const std::string& label) const {
  for (const auto& r : rows)
    if (r.label == label) return r;
  throw std::out_of_range("no fixture row '" + label + "'");
}

const FixtureRow& FixtureTable::reference_for(const FixtureRow& row) const {
  for (const auto& r : rows)
    if (!r.optimized() && r.w == row.w && r.setup() == row.setup()) return r;
  throw std::out_of_range("no reference row for '" + row.label + "'");
}

EnsembleConfig fixture_config(const FixtureRow& row, int L, int M) {
  EnsembleConfig c;
  c.dv = row.dv;
  c.dc = row.dc();
  c.L = L;
  c.M = M;
  c.nu = row.nu;
  return c;
}

EnsembleSpec fixture_spec(const FixtureRow& row, int L, int M) {
  return make_spec(fixture_config(row, L, M));
}

std::vector<FixtureCheck> check_fixture_rates(const FixtureTable& table, double tol) {
  std::vector<FixtureCheck> out;
  for (const auto& row : table.rows) {
    FixtureCheck c;
    c.label = row.label;
    c.expected = row.rate;
    const auto v = validate_spec(fixture_config(row), Usage::finite_length);
    if (!v) {
      c.problem = v.message();
    } else {
      c.computed = design_rate(fixture_spec(row)).design_rate;
      c.ok = std::abs(c.computed - c.expected) <= tol;
      if (!c.ok) c.problem = "rate mismatch";
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace scwave
