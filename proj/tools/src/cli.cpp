#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "CLI11.hpp"
#include "sifair/error.hpp"
#include "sifair/io.hpp"
#include "sifair/manifest.hpp"
#include "sifair/theorems.hpp"

namespace sifair::cli {

namespace {

namespace fs = std::filesystem;

struct OutputsExist : Error {
  using Error::Error;
};

struct Options {
  std::string manifest;
  std::string out;
  bool force = false;
  std::size_t jobs = 1;
  std::vector<double> betas{0, 0.5, 1, 2, 5, 10, 20};
  std::vector<double> deltas{0, 0.5, 1, 2, 5, 10, 20};
  std::string variant = "both";
  std::size_t seeds = 50;
  std::string which;
  int rows = 6;
  int cols = 6;
  double edge_cost = 60;
  int rows_per_area = 3;
  int cols_per_area = 3;
};

// Fails before anything is written if a target exists and --force is absent.
void prepare_outputs(const fs::path& dir, const std::vector<std::string>& names, bool force) {
  if (!force) {
    for (const auto& n : names) {
      if (fs::exists(dir / n)) {
        throw OutputsExist((dir / n).string() + " exists; pass --force to overwrite");
      }
    }
  }
  fs::create_directories(dir);
}

std::string fmt(double x) { return io::format_real(x); }

std::string summary_text(const RunResult& r) {
  std::ostringstream s;
  s << "service_rate " << fmt(r.service_rate()) << "\n"
    << "requests " << r.total_requests << "\n"
    << "served " << r.total_served << "\n"
    << "passenger_f_gini " << fmt(r.passenger.f_gini) << "\n"
    << "passenger_min " << fmt(r.passenger.min_value) << "\n"
    << "driver_f_gini " << fmt(r.driver.f_gini) << "\n"
    << "driver_min " << fmt(r.driver.min_value) << "\n";
  return s.str();
}

int cmd_run(const Options& o, std::ostream& out) {
  const auto setup = load_manifest(o.manifest);
  const fs::path dir = o.out;
  prepare_outputs(dir, {"result.json", "metrics.csv", "summary.txt"}, o.force);
  const auto result = run_simulation(setup.config, setup.net, setup.partition, setup.requests, setup.fleet);
  io::write_file_atomic(dir / "result.json", result_to_json(result));
  io::write_file_atomic(dir / "metrics.csv", metrics_csv(result.log));
  io::write_file_atomic(dir / "summary.txt", summary_text(result));
  out << summary_text(result) << "wall_seconds " << fmt(result.wall_seconds) << "\n";
  return kOk;
}

std::vector<Variant> variants_for(const std::string& v) {
  if (v == "si") return {{false, false}};
  if (v == "si-plus") return {{true, true}};
  return {{false, false}, {false, true}, {true, false}, {true, true}};
}

std::string sweep_header() {
  return "beta,delta,passenger_plus,driver_plus," + metrics_csv_header() + ",total_requests,total_served";
}

std::string sweep_line(const SweepRow& row) {
  MetricsRow m = row.result.log.empty() ? MetricsRow{} : row.result.log.back();
  std::ostringstream s;
  s << fmt(row.beta) << "," << fmt(row.delta) << "," << (row.variant.passenger_plus ? 1 : 0) << ","
    << (row.variant.driver_plus ? 1 : 0) << "," << metrics_csv_line(m) << ","
    << row.result.total_requests << "," << row.result.total_served;
  return s.str();
}

std::string describe(const SweepRow& row) {
  std::ostringstream s;
  s << "beta=" << fmt(row.beta) << " delta=" << fmt(row.delta)
    << " passenger_plus=" << (row.variant.passenger_plus ? 1 : 0)
    << " driver_plus=" << (row.variant.driver_plus ? 1 : 0)
    << " service_rate=" << fmt(row.result.service_rate())
    << " passenger_f_gini=" << fmt(row.result.passenger.f_gini)
    << " driver_f_gini=" << fmt(row.result.driver.f_gini);
  return s.str();
}

// Best F_Gini among rows keeping at least 95% of the zero-weight service rate.
std::string frontier_summary(const std::vector<SweepRow>& rows) {
  const SweepRow* base = nullptr;
  for (const auto& r : rows) {
    if (r.beta == 0 && r.delta == 0) {
      base = &r;
      break;
    }
  }
  std::ostringstream s;
  if (!base) {
    s << "no zero-weight row in the grid; frontier not reported\n";
    return s.str();
  }
  const double floor = 0.95 * base->result.service_rate();
  s << "baseline " << describe(*base) << "\n";
  s << "service_rate_floor " << fmt(floor) << "\n";
  auto best = [&](bool passenger) {
    const SweepRow* pick = nullptr;
    const auto key = [&](const SweepRow& r) {
      return passenger ? r.result.passenger.f_gini : r.result.driver.f_gini;
    };
    for (const auto& r : rows) {
      if (r.result.service_rate() < floor || key(r) <= key(*base)) continue;
      if (!pick || key(r) > key(*pick)) pick = &r;
    }
    return pick;
  };
  const auto* p = best(true);
  const auto* d = best(false);
  s << "passenger_frontier " << (p ? describe(*p) : std::string("none")) << "\n";
  s << "driver_frontier " << (d ? describe(*d) : std::string("none")) << "\n";
  return s.str();
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto setup = load_manifest(o.manifest);
  const fs::path dir = o.out;
  prepare_outputs(dir, {"sweep.csv", "summary.txt"}, o.force);
  const auto rows = sweep(setup.config, setup.net, setup.partition, setup.requests, setup.fleet, o.betas,
                          o.deltas, variants_for(o.variant), o.jobs);
  std::string csv = sweep_header() + "\n";
  for (const auto& r : rows) csv += sweep_line(r) + "\n";
  io::write_file_atomic(dir / "sweep.csv", csv);
  const auto summary = frontier_summary(rows);
  io::write_file_atomic(dir / "summary.txt", summary);
  out << rows.size() << " rows\n" << summary;
  return kOk;
}

int cmd_theorem(const Options& o, std::ostream& out, std::ostream& err) {
  const bool passenger = o.which == "passenger";
  if (!passenger && o.variant != "si-plus") {
    err << "driver check is defined for clipped driver incentives only; use --variant si-plus\n";
    return kUsage;
  }
  if (passenger && o.variant == "both") {
    err << "passenger theorem-check takes --variant si or si-plus\n";
    return kUsage;
  }
  if (o.seeds == 0) {
    err << "--seeds must be at least 1\n";
    return kUsage;
  }
  const fs::path dir = o.out;
  const std::string table = "theorem_" + o.which + ".csv";
  prepare_outputs(dir, {table}, o.force);

  std::string csv = "seed,precondition_holds,baseline,best_weight,best_value,improved\n";
  std::size_t failed = 0;
  for (std::uint64_t seed = 0; seed < o.seeds; ++seed) {
    TheoremResult res;
    res.seed = seed;
    std::string problem;
    try {
      res = passenger ? check_passenger_theorem(seed, kWeightLadder, o.variant == "si-plus")
                      : check_driver_theorem(seed, kWeightLadder);
    } catch (const ContractError& e) {
      problem = e.what();
    }
    double best_w = 0;
    double best_v = res.baseline;
    for (const auto& [w, v] : res.ladder) {
      if (v > best_v) {
        best_w = w;
        best_v = v;
      }
    }
    const bool pass = problem.empty() && res.precondition_holds && res.improved;
    csv += std::to_string(seed) + "," + (res.precondition_holds ? "1" : "0") + "," + fmt(res.baseline) +
           "," + fmt(best_w) + "," + fmt(best_v) + "," + (res.improved ? "1" : "0") + "\n";
    if (!pass) {
      ++failed;
      const auto dump = dir / ("failing_seed_" + std::to_string(seed) + ".json");
      io::write_file_atomic(dump, problem.empty() ? res.dump : "{\"error\": \"" + problem + "\"}\n");
      err << "seed " << seed << " failed; instance written to " << dump.string() << "\n";
    }
  }
  io::write_file_atomic(dir / table, csv);
  out << o.which << ": " << (o.seeds - failed) << "/" << o.seeds << " seeds passed\n";
  return failed == 0 ? kOk : kTheoremFailed;
}

int cmd_gen_demand(const Options& o, std::ostream& out) {
  const auto setup = load_manifest(o.manifest);
  const fs::path dir = o.out;
  prepare_outputs(dir, {"requests.csv"}, o.force);
  write_requests(dir / "requests.csv", setup.requests, setup.net);
  out << setup.requests.size() << " requests\n";
  return kOk;
}

int cmd_gen_network(const Options& o, std::ostream& out) {
  const fs::path dir = o.out;
  const auto net = make_grid(o.rows, o.cols, o.edge_cost);
  const auto part = make_grid_partition(o.rows, o.cols, o.rows_per_area, o.cols_per_area);
  prepare_outputs(dir, {"network.csv", "partition.csv"}, o.force);
  write_network(dir / "network.csv", net);
  write_partition(dir / "partition.csv", part, net);
  out << net.size() << " locations, " << part.num_areas() << " areas\n";
  return kOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const auto setup = load_manifest(o.manifest);
  out << "ok: " << setup.net.size() << " locations, " << setup.partition.num_areas() << " areas, "
      << setup.fleet.size() << " vehicles, " << setup.requests.size() << " requests\n";
  return kOk;
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Fairness-aware ridesharing dispatch simulator"};
  app.require_subcommand(1);

  auto add_manifest = [&](CLI::App* c) {
    c->add_option("--manifest", o.manifest, "JSON run manifest")->required()->check(CLI::ExistingFile);
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output directory")->required();
    c->add_flag("--force", o.force, "Overwrite existing outputs");
  };

  auto* run = app.add_subcommand("run", "Run one simulation");
  add_manifest(run);
  add_out(run);

  auto* sw = app.add_subcommand("sweep", "Sweep incentive weights");
  add_manifest(sw);
  add_out(sw);
  sw->add_option("--jobs", o.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sw->add_option("--beta", o.betas, "Passenger weights")->delimiter(',')->check(CLI::NonNegativeNumber);
  sw->add_option("--delta", o.deltas, "Driver weights")->delimiter(',')->check(CLI::NonNegativeNumber);
  sw->add_option("--variant", o.variant, "Incentive variant")->check(CLI::IsMember({"si", "si-plus", "both"}));

  auto* th = app.add_subcommand("theorem-check", "Check the improvement guarantees on seeded instances");
  th->add_option("which", o.which, "passenger or driver")->required()->check(CLI::IsMember({"passenger", "driver"}));
  th->add_option("--seeds", o.seeds, "Number of seeds");
  th->add_option("--variant", o.variant, "Incentive variant")->check(CLI::IsMember({"si", "si-plus", "both"}));
  add_out(th);

  auto* gd = app.add_subcommand("gen-demand", "Write the manifest's demand as a request file");
  add_manifest(gd);
  add_out(gd);

  auto* gn = app.add_subcommand("gen-network", "Write a grid network and partition");
  gn->add_option("--rows", o.rows)->check(CLI::PositiveNumber);
  gn->add_option("--cols", o.cols)->check(CLI::PositiveNumber);
  gn->add_option("--edge-cost", o.edge_cost)->check(CLI::PositiveNumber);
  gn->add_option("--rows-per-area", o.rows_per_area)->check(CLI::PositiveNumber);
  gn->add_option("--cols-per-area", o.cols_per_area)->check(CLI::PositiveNumber);
  add_out(gn);

  auto* vc = app.add_subcommand("validate-config", "Parse and validate a manifest");
  add_manifest(vc);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_out;
    std::ostringstream o_err;
    const int code = app.exit(e, o_out, o_err);
    out << o_out.str();
    err << o_err.str();
    return code == 0 ? kOk : kUsage;
  }
  if (th->parsed() && th->count("--variant") == 0) o.variant = o.which == "driver" ? "si-plus" : "si";

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (sw->parsed()) return cmd_sweep(o, out);
    if (th->parsed()) return cmd_theorem(o, out, err);
    if (gd->parsed()) return cmd_gen_demand(o, out);
    if (gn->parsed()) return cmd_gen_network(o, out);
    if (vc->parsed()) return cmd_validate(o, out);
  } catch (const OutputsExist& e) {
    err << "error: " << e.what() << "\n";
    return kOutputsExist;
  } catch (const ContractError& e) {
    err << "contract violation: " << e.what() << "\n";
    return kRuntime;
  } catch (const ConfigError& e) {
    err << "invalid manifest: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace sifair::cli
