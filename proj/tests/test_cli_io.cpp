#include "scwave/cli.hpp"
#include "scwave/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

using namespace scwave;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cmd_dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("scwave_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_ensemble(const TempDir& dir, const std::string& name, const EnsembleConfig& c) {
  const auto p = dir.file(name);
  write_file_atomic(p, to_json(c).dump());
  return p;
}

EnsembleConfig uniform(int dv, int w, int L = 100, int M = 0) {
  EnsembleConfig c;
  c.dv = dv;
  c.dc = 2 * dv;
  c.L = L;
  c.M = M;
  c.nu = std::vector<double>(static_cast<std::size_t>(w), 1.0 / w);
  return c;
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("grid and list parsing") {
  const auto g = parse_grid("0.45:0.47:0.01");
  REQUIRE(g.size() == 3);
  CHECK(g[2] == 0.47);
  CHECK(parse_grid("0.4") == std::vector<double>{0.4});
  CHECK(parse_grid("0.40:0.48:0.02").size() == 5);
  CHECK_THROWS_AS(parse_grid("0.5:0.4:0.01"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("a:b:c"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0.4:0.5:0"), std::invalid_argument);
  CHECK(parse_int_list("3..6") == std::vector<int>{3, 4, 5, 6});
  CHECK(parse_int_list("3,5") == std::vector<int>{3, 5});
  CHECK(parse_int_list("4") == std::vector<int>{4});
  CHECK_THROWS_AS(parse_int_list("6..3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_int_list("x"), std::invalid_argument);
}

TEST_CASE("ensemble JSON round trip") {
  EnsembleConfig c = uniform(4, 5, 60, 200);
  c.nu = {0.1, 0.2, 0.3, 0.15, 0.25};
  const auto back = ensemble_from_json(json::parse(to_json(c).dump()));
  CHECK(back.dv == 4);
  CHECK(back.dc == 8);
  CHECK(back.L == 60);
  CHECK(back.M == 200);
  CHECK(back.nu == c.nu);
  CHECK_THROWS_AS(ensemble_from_json(json::parse(R"({"dv": 3})")), SpecError);
  CHECK_THROWS_AS(ensemble_from_json(json::parse(R"({"dv": "x", "dc": 6, "L": 10, "nu": [1]})")), SpecError);
  CHECK(ensemble_from_json(json::parse(R"({"dv": 3, "dc": 6, "L": 10, "nu": [1]})")).M == 0);
}

TEST_CASE("double formatting round trips") {
  for (double x : {0.1, 1.0 / 3, 0.49089, 1e-300, 12345.678}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("speed CSV round trip") {
  std::vector<SpeedRow> rows{{"uniform_dv3", 0.46, 3, 6, 3, 0.145, 138, true},
                             {"uniform_dv3", 0.52, 3, 6, 3, 0.0, 0, false}};
  const auto csv = speed_csv(rows);
  CHECK(csv.rfind("epsilon,dv,dc,w,speed,iterations,feasible,series\n", 0) == 0);
  const auto back = parse_speed_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].series == "uniform_dv3");
  CHECK(back[0].epsilon == 0.46);
  CHECK(back[0].speed == 0.145);
  CHECK(back[0].iterations == 138);
  CHECK(back[0].feasible);
  CHECK_FALSE(back[1].feasible);
  CHECK(speed_csv({}) == "epsilon,dv,dc,w,speed,iterations,feasible,series\n");
  CHECK(parse_speed_csv(speed_csv({})).empty());
  const auto j = speed_series_json(rows);
  REQUIRE(j["series"].size() == 1);
  CHECK(j["series"][0]["epsilon"].size() == 2);
}

TEST_CASE("simulation and trace CSVs") {
  SimReport rep;
  rep.bits_per_frame = 100;
  SimPoint p;
  p.param = 0.43;
  p.frames = 200;
  p.frame_errors = 3;
  p.bit_errors = 0;
  p.erasures = 40;
  p.ber = bit_error_rate(0, 40, 200, 100);
  p.fer = 0.015;
  p.fer_ci = wilson_interval(3, 200);
  rep.points.push_back(p);
  const auto t = parse_csv(sim_csv(rep));
  REQUIRE(t.rows.size() == 1);
  CHECK(t.header.front() == "param");
  CHECK(std::stod(t.rows[0][t.column("FER")]) == 0.015);
  CHECK(std::stod(t.rows[0][t.column("BER")]) == p.ber);
  CHECK(std::stoull(t.rows[0][t.column("frame_errors")]) == 3);
  CHECK_THROWS(t.column("nope"));

  const auto tr = parse_csv(trace_csv({110.5, 108.25}));
  REQUIRE(tr.rows.size() == 2);
  CHECK(tr.header == std::vector<std::string>{"generation", "best_cost"});
  CHECK(std::stod(tr.rows[1][1]) == 108.25);

  const auto pr = parse_csv(profiles_csv({Vector::Constant(3, 0.4)}));
  CHECK(pr.rows.size() == 3);
  CHECK(pr.rows[0][1] == "1");
}

TEST_CASE("atomic writes and manifests") {
  TempDir dir;
  const auto p = dir.file("a.txt");
  write_file_atomic(p, "one\n");
  write_file_atomic(p, "two\n");
  CHECK(read_file(p) == "two\n");
  CHECK_FALSE(fs::exists(p + ".tmp"));
  CHECK(manifest_path("x/out.csv").string() == "x/out.csv.manifest.json");
  RunManifest m;
  m.subcommand = "speed";
  m.seed = 7;
  m.timestamp = utc_timestamp();
  const auto j = m.to_json();
  CHECK(j["subcommand"] == "speed");
  CHECK(j["seed"] == 7);
  CHECK(j["version"] == SCWAVE_VERSION);
  CHECK(j["timestamp"].get<std::string>().back() == 'Z');
}

TEST_CASE("rate subcommand") {
  TempDir dir;
  const auto e = write_ensemble(dir, "u.json", uniform(3, 3));
  const auto r = run({"rate", "--ensemble", e});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "0.49089\n");
  const auto rj = run({"rate", "--ensemble", e, "--json"});
  CHECK(json::parse(rj.out)["design_rate"].get<double>() == doctest::Approx(0.49089).epsilon(1e-5));
}

TEST_CASE("fixtures subcommand") {
  const auto r = run({"fixtures", "--check"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("14/14 rates match") != std::string::npos);
  CHECK(run({"fixtures", "--list"}).out.find("NU_8B") != std::string::npos);
  CHECK(run({"fixtures"}).code == kExitUsage);
}

TEST_CASE("usage and domain errors") {
  const auto bad_flag = run({"rate", "--bogus"});
  CHECK(bad_flag.code == kExitUsage);
  CHECK(bad_flag.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);

  TempDir dir;
  auto c = uniform(3, 3);
  c.nu = {0.5, 0.6};
  const auto e = write_ensemble(dir, "bad.json", c);
  const auto r = run({"rate", "--ensemble", e});
  CHECK(r.code == kExitDomainError);
  CHECK(r.err.find("profile sums to 1.1") != std::string::npos);
  CHECK(run({"speed", "--w", "3", "--epsilon-grid", "0.5:0.4:0.1"}).code == kExitUsage);
}

TEST_CASE("de and threshold subcommands") {
  TempDir dir;
  const auto e = write_ensemble(dir, "u.json", uniform(3, 1, 10));
  const auto d = run({"de", "--ensemble", e, "--epsilon", "0.4"});
  REQUIRE(d.code == kExitOk);
  CHECK(json::parse(d.out)["converged"] == true);
  const auto t = run({"threshold", "--ensemble", e, "--tol", "1e-4"});
  REQUIRE(t.code == kExitOk);
  CHECK(std::stod(t.out) == doctest::Approx(0.4294).epsilon(2e-3));
}

TEST_CASE("speed subcommand writes one series per degree") {
  TempDir dir;
  const auto opt = dir.file("opt.json");
  write_file_atomic(opt, R"({"dv": 3, "dc": 6, "nu": [0.37124, 0.00835, 0.62041]})");
  const auto out = dir.file("speed.csv");
  const auto r = run({"-q", "speed", "--w", "3", "--dv", "3,4", "--epsilon-grid", "0.45:0.46:0.01",
                      "--optimized", opt, "--out", out});
  REQUIRE(r.code == kExitOk);
  const auto rows = parse_speed_csv(read_file(out));
  CHECK(rows.size() == 6);
  const auto series = json::parse(read_file(out + ".series.json"));
  CHECK(series["series"].size() == 3);
  CHECK(fs::exists(manifest_path(out)));
  CHECK(series["series"][2]["name"] == "optimized_dv3");
}

TEST_CASE("construct and simulate subcommands") {
  TempDir dir;
  const auto e = write_ensemble(dir, "m.json", uniform(3, 3, 12, 40));
  const auto alist = dir.file("g.alist");
  const auto c = run({"-q", "construct", "--ensemble", e, "--seed", "3", "--out", alist, "--stats"});
  REQUIRE(c.code == kExitOk);
  CHECK(import_alist(alist).cols == 480);
  const auto stats = json::parse(c.out);
  CHECK(stats["variables"] == 480);
  const auto s = run({"-q", "simulate", "--ensemble", e, "--grid", "0:0.5:0.5", "--frames", "64", "--seed", "5"});
  REQUIRE(s.code == kExitOk);
  const auto t = parse_csv(s.out);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::stod(t.rows[0][t.column("FER")]) == 0.0);
  CHECK(std::stod(t.rows[1][t.column("FER")]) > 0.5);
  const auto again = run({"-q", "simulate", "--ensemble", e, "--grid", "0:0.5:0.5", "--frames", "64", "--seed", "5"});
  CHECK(again.out == s.out);
}

TEST_CASE("standalone binary exit codes") {
  const std::string bin = SCWAVE_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("fixtures --check") == 0);
  CHECK(status("rate --no-such-flag") == 2);
  CHECK(status("--version") == 0);
}

}  // TEST_SUITE
