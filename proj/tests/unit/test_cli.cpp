#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "testing.hpp"

using namespace sifair;
using sifair::testing::slurp;
using sifair::testing::TempDir;

namespace {

struct Call {
  int code;
  std::string out;
  std::string err;
};

Call call(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_main(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSmall = R"({
  "horizon": 600,
  "fleet": {"size": 3, "capacity": 2},
  "network": {"grid": {"rows": 3, "cols": 4, "edge_cost": 60}},
  "partition": {"grid": {"rows_per_area": 3, "cols_per_area": 2}},
  "demand": {"synthetic": {"rates": [0.4, 0.1, 0.1, 0.2], "seed": 2}},
  "weights": {"beta": 0, "delta": 0}
}
)";

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("run writes three files and refuses to overwrite") {
  TempDir dir("cli_run");
  const auto m = dir.write("m.json", kSmall).string();
  const auto out = (dir.path() / "out").string();
  const auto first = call({"run", "--manifest", m, "--out", out});
  REQUIRE(first.code == cli::kOk);
  for (const auto* f : {"result.json", "metrics.csv", "summary.txt"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(out) / f));
  }
  CHECK(lines(slurp(std::filesystem::path(out) / "metrics.csv")).size() == 11);
  CHECK(first.out.find("service_rate") != std::string::npos);

  const auto before = slurp(std::filesystem::path(out) / "metrics.csv");
  const auto when = std::filesystem::last_write_time(std::filesystem::path(out) / "metrics.csv");
  const auto again = call({"run", "--manifest", m, "--out", out});
  CHECK(again.code == cli::kOutputsExist);
  CHECK(std::filesystem::last_write_time(std::filesystem::path(out) / "metrics.csv") == when);

  const auto forced = call({"run", "--manifest", m, "--out", out, "--force"});
  CHECK(forced.code == cli::kOk);
  CHECK(slurp(std::filesystem::path(out) / "metrics.csv") == before);
}

TEST_CASE("invalid manifests and usage") {
  TempDir dir("cli_bad");
  std::string neg = kSmall;
  neg.replace(neg.find("\"beta\": 0"), 9, "\"beta\": -2");
  const auto m = dir.write("neg.json", neg).string();
  const auto r = call({"run", "--manifest", m, "--out", (dir.path() / "o").string()});
  CHECK(r.code == cli::kUsage);
  CHECK(r.err.find("neg.json:7") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "o" / "result.json"));

  const auto broken = dir.write("broken.json", "{\n  \"horizon\": ,\n}\n").string();
  CHECK(call({"validate-config", "--manifest", broken}).code == cli::kUsage);
  CHECK(call({"validate-config", "--manifest", dir.write("ok.json", kSmall).string()}).code == cli::kOk);
  CHECK(call({}).code == cli::kUsage);
  CHECK(call({"frobnicate"}).code == cli::kUsage);
  CHECK(call({"run", "--out", "x"}).code == cli::kUsage);
  CHECK(call({"sweep", "--manifest", m, "--out", "x", "--beta", "a,b"}).code == cli::kUsage);
  CHECK(call({"--help"}).code == cli::kOk);
}

TEST_CASE("sweep output") {
  TempDir dir("cli_sweep");
  const auto m = dir.write("m.json", kSmall).string();
  const auto out = dir.path() / "sweep";
  const auto r = call({"sweep", "--manifest", m, "--out", out.string(), "--jobs", "2"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(slurp(out / "sweep.csv"));
  REQUIRE(rows.size() == 197);
  CHECK(rows[0] ==
        "beta,delta,passenger_plus,driver_plus,window_index,overall_service_rate,passenger_f_gini,"
        "passenger_min,passenger_var,driver_f_gini,driver_min_raw,driver_var,total_requests,total_served");
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const auto a = split(rows[i - 1]);
    const auto b = split(rows[i]);
    const auto key = [](const std::vector<std::string>& f) {
      return std::tuple(std::stod(f[0]), std::stod(f[1]), f[2], f[3]);
    };
    CHECK(key(a) < key(b));
    CHECK(a[12] == b[12]);
  }
  CHECK(slurp(out / "summary.txt").find("service_rate_floor") != std::string::npos);

  // The zero-weight row equals the plain run's last metrics line.
  const auto run_out = dir.path() / "run";
  REQUIRE(call({"run", "--manifest", m, "--out", run_out.string()}).code == cli::kOk);
  const auto metrics = lines(slurp(run_out / "metrics.csv"));
  const auto zero = split(rows[1]);
  std::string tail;
  for (std::size_t k = 4; k < 12; ++k) tail += (k > 4 ? "," : "") + zero[k];
  CHECK(tail == metrics.back());

  const auto small = dir.path() / "small";
  REQUIRE(call({"sweep", "--manifest", m, "--out", small.string(), "--beta", "0,1", "--delta", "0",
                "--variant", "si-plus"})
              .code == cli::kOk);
  CHECK(lines(slurp(small / "sweep.csv")).size() == 3);
  const auto repeat = dir.path() / "repeat";
  REQUIRE(call({"sweep", "--manifest", m, "--out", repeat.string(), "--beta", "0,1", "--delta", "0",
                "--variant", "si-plus", "--jobs", "3"})
              .code == cli::kOk);
  CHECK(slurp(small / "sweep.csv") == slurp(repeat / "sweep.csv"));
}

TEST_CASE("theorem checks") {
  TempDir dir("cli_thm");
  const auto out = dir.path().string();
  const auto p = call({"theorem-check", "passenger", "--seeds", "50", "--out", out});
  CHECK(p.code == cli::kOk);
  CHECK(lines(slurp(dir.path() / "theorem_passenger.csv")).size() == 51);
  const auto d = call({"theorem-check", "driver", "--seeds", "50", "--out", out});
  CHECK(d.code == cli::kOk);
  CHECK(call({"theorem-check", "driver", "--variant", "si", "--out", out, "--force"}).code == cli::kUsage);
  CHECK(call({"theorem-check", "passenger", "--seeds", "0", "--out", out, "--force"}).code == cli::kUsage);
  CHECK(call({"theorem-check", "driver", "--out", out}).code == cli::kOutputsExist);
}

TEST_CASE("generators") {
  TempDir dir("cli_gen");
  const auto g = dir.path() / "grid";
  REQUIRE(call({"gen-network", "--rows", "3", "--cols", "4", "--rows-per-area", "3", "--cols-per-area", "2",
                "--out", g.string()})
              .code == cli::kOk);
  const auto net_lines = lines(slurp(g / "network.csv"));
  REQUIRE(net_lines.size() == 35);
  CHECK(net_lines[0][0] == '#');
  CHECK(lines(slurp(g / "partition.csv")).size() == 13);

  const auto m = dir.write("m.json", kSmall).string();
  REQUIRE(call({"gen-demand", "--manifest", m, "--out", g.string()}).code == cli::kOk);
  const auto file_manifest = dir.write("f.json", R"({
    "horizon": 600,
    "fleet": {"size": 3, "capacity": 2},
    "network": {"file": "grid/network.csv"},
    "partition": {"file": "grid/partition.csv"},
    "demand": {"file": "grid/requests.csv"}
  })");
  const auto a = dir.path() / "a";
  const auto b = dir.path() / "b";
  REQUIRE(call({"run", "--manifest", m, "--out", a.string()}).code == cli::kOk);
  REQUIRE(call({"run", "--manifest", file_manifest.string(), "--out", b.string()}).code == cli::kOk);
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
}
