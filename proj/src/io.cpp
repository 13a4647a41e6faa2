#include "scwave/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace scwave {

json to_json(const EnsembleConfig& c) {
  json j;
  j["dv"] = c.dv;
  j["dc"] = c.dc;
  j["L"] = c.L;
  j["M"] = c.M;
  j["nu"] = c.nu;
  return j;
}

EnsembleConfig ensemble_from_json(const json& j) {
  EnsembleConfig c;
  try {
    c.dv = j.at("dv").get<int>();
    c.dc = j.at("dc").get<int>();
    c.L = j.at("L").get<int>();
    c.M = j.value("M", 0);
    c.nu = j.at("nu").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed ensemble: ") + e.what());
  }
  return c;
}

EnsembleConfig read_ensemble(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw SpecError(path.string() + ": " + e.what());
  }
  return ensemble_from_json(j);
}

namespace {

std::string format_fixed_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> parts;
  std::istringstream is(s);
  std::string field;
  while (std::getline(is, field, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad grid '" + s + "'");
    }
    if (used != field.size()) throw std::invalid_argument("bad grid '" + s + "'");
    parts.push_back(v);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw std::invalid_argument("grid must be a:b:step (got '" + s + "')");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || b < a) throw std::invalid_argument("grid needs a <= b and step > 0");
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long k = 0; k <= n; ++k) {
    // snap 0.47000000000000003 back to 0.47
    const double v = a + static_cast<double>(k) * step;
    grid.push_back(std::stod(format_fixed_sig(v)));
  }
  return grid;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  try {
    if (const auto dots = s.find(".."); dots != std::string::npos) {
      const int lo = std::stoi(s.substr(0, dots));
      const int hi = std::stoi(s.substr(dots + 2));
      if (hi < lo) throw std::invalid_argument("empty range");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
      return out;
    }
    std::istringstream is(s);
    std::string field;
    while (std::getline(is, field, ',')) out.push_back(std::stoi(field));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer list '" + s + "' (use 3..10 or 3,4,5)");
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << contents;
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json RunManifest::to_json() const {
  json j;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["seed"] = seed;
  j["seed_generated"] = seed_generated;
  j["version"] = version;
  j["timestamp"] = timestamp.empty() ? utc_timestamp() : timestamp;
  return j;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  return std::filesystem::path(output.string() + ".manifest.json");
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no CSV column '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) {
      const auto b = field.find_first_not_of(' ');
      fields.push_back(b == std::string::npos ? std::string() : field.substr(b));
    }
    if (line.back() == ',') fields.emplace_back();
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size()) throw std::runtime_error("CSV row width does not match header");
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

std::string speed_csv(const std::vector<SpeedRow>& rows) {
  std::ostringstream os;
  os << "epsilon,dv,dc,w,speed,iterations,feasible,series\n";
  for (const auto& r : rows)
    os << format_double(r.epsilon) << ',' << r.dv << ',' << r.dc << ',' << r.w << ','
       << format_double(r.speed) << ',' << r.iterations << ',' << (r.feasible ? 1 : 0) << ','
       << r.series << '\n';
  return os.str();
}

std::vector<SpeedRow> parse_speed_csv(const std::string& text) {
  const auto t = parse_csv(text);
  std::vector<SpeedRow> rows;
  if (t.header.empty()) return rows;
  const auto ce = t.column("epsilon"), cdv = t.column("dv"), cdc = t.column("dc"), cw = t.column("w"),
             cs = t.column("speed"), ci = t.column("iterations"), cf = t.column("feasible"),
             cser = t.column("series");
  for (const auto& f : t.rows) {
    SpeedRow r;
    r.epsilon = std::stod(f[ce]);
    r.dv = std::stoi(f[cdv]);
    r.dc = std::stoi(f[cdc]);
    r.w = std::stoi(f[cw]);
    r.speed = std::stod(f[cs]);
    r.iterations = std::stoi(f[ci]);
    r.feasible = f[cf] == "1";
    r.series = f[cser];
    rows.push_back(std::move(r));
  }
  return rows;
}

json speed_series_json(const std::vector<SpeedRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, json> series;
  for (const auto& r : rows) {
    auto [it, inserted] = series.try_emplace(r.series);
    if (inserted) {
      order.push_back(r.series);
      it->second = {{"name", r.series}, {"dv", r.dv}, {"dc", r.dc}, {"w", r.w},
                    {"epsilon", json::array()}, {"speed", json::array()},
                    {"iterations", json::array()}, {"feasible", json::array()}};
    }
    it->second["epsilon"].push_back(r.epsilon);
    it->second["speed"].push_back(r.speed);
    it->second["iterations"].push_back(r.iterations);
    it->second["feasible"].push_back(r.feasible);
  }
  json out;
  out["series"] = json::array();
  for (const auto& name : order) out["series"].push_back(series[name]);
  return out;
}

std::string sim_csv(const SimReport& report) {
  std::ostringstream os;
  os << "param,frames,frame_errors,bit_errors,erasures,BER,FER,ci_low,ci_high\n";
  for (const auto& p : report.points)
    os << format_double(p.param) << ',' << p.frames << ',' << p.frame_errors << ',' << p.bit_errors
       << ',' << p.erasures << ',' << format_double(p.ber) << ',' << format_double(p.fer) << ','
       << format_double(p.fer_ci.low) << ',' << format_double(p.fer_ci.high) << '\n';
  return os.str();
}

std::string trace_csv(const std::vector<double>& best_costs) {
  std::ostringstream os;
  os << "generation,best_cost\n";
  for (std::size_t g = 0; g < best_costs.size(); ++g) os << g << ',' << format_double(best_costs[g]) << '\n';
  return os.str();
}

std::string profiles_csv(const std::vector<Vector>& profiles) {
  std::ostringstream os;
  os << "t,z,x\n";
  for (std::size_t t = 0; t < profiles.size(); ++t)
    for (Eigen::Index z = 0; z < profiles[t].size(); ++z)
      os << t << ',' << z + 1 << ',' << format_double(profiles[t][z]) << '\n';
  return os.str();
}

json to_json(const DegreeResult& r, double epsilon) {
  json j;
  j["dv"] = r.dv;
  j["dc"] = r.dc;
  j["nu"] = std::vector<double>(r.profile.weights().data(), r.profile.weights().data() + r.profile.width());
  j["cost"] = std::isfinite(r.cost) ? json(r.cost) : json(nullptr);
  j["speed"] = r.speed;
  j["epsilon"] = epsilon;
  j["t20"] = r.t20.iterations;
  j["feasible"] = r.feasible;
  return j;
}

}  // namespace scwave
