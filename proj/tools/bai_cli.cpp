// bai: characteristic times, experiments, ratio sweeps, and the validation
// suite for fixed-confidence best-arm identification in SPEF bandits.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bai/config.hpp"
#include "bai/errors.hpp"
#include "bai/harness.hpp"
#include "bai/validation.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitRuntime = 4;

std::string fmt4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw bai::ConfigError(std::string(what) + ": bad number '" + item + "'");
    }
  }
  if (out.empty()) throw bai::ConfigError(std::string(what) + ": empty list");
  return out;
}

struct InstanceFlags {
  std::string model = "bernoulli";
  std::string means;
  double sigma2 = 1.0;
  double scale = 1.0;

  bai::Instance build() const {
    if (means.empty()) throw bai::ConfigError("--means is required");
    try {
      return bai::Instance(bai::Model::from_name(model, sigma2, scale),
                           parse_number_list(means, "--means"));
    } catch (const std::invalid_argument& e) {
      throw bai::ConfigError(e.what());
    }
  }
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& flags) {
  cmd->add_option("--model", flags.model,
                  "bernoulli|gaussian|poisson|exponential|pareto");
  cmd->add_option("--means", flags.means, "comma-separated arm means");
  cmd->add_option("--sigma2", flags.sigma2, "Gaussian variance");
  cmd->add_option("--scale", flags.scale, "Pareto scale");
}

bai::Threshold parse_threshold_flag(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ':'))
    if (!item.empty()) parts.push_back(item);
  if (parts.size() == 1 && parts[0] == "heuristic") return bai::Threshold::heuristic();
  if (parts.size() == 3 && parts[0] == "deviational") {
    try {
      return bai::Threshold::deviational(std::stod(parts[1]), std::stod(parts[2]));
    } catch (const std::exception& e) {
      throw bai::ConfigError(std::string("--threshold: ") + e.what());
    }
  }
  throw bai::ConfigError("--threshold: expected 'heuristic' or 'deviational:<c>:<alpha>'");
}

int default_workers_from_env() {
  if (const char* env = std::getenv("BAI_WORKERS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      throw bai::ConfigError("BAI_WORKERS: expected an integer");
    }
  }
  return 0;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void print_weights(std::ostream& os, const char* label, const bai::Weights& w) {
  os << label << " = (";
  for (int i = 0; i < w.size(); ++i) os << (i ? ", " : "") << fmt4(w[i]);
  os << ")\n";
}

int cmd_times(const InstanceFlags& flags, const std::string& deltas_csv,
              const std::string& csv_path) {
  const bai::Instance inst = flags.build();
  const std::vector<double> deltas = parse_number_list(deltas_csv, "--deltas");
  const bai::CharacteristicTimes ct = bai::characteristic_times(inst);
  const bai::Threshold heuristic = bai::Threshold::heuristic();

  std::cout << "instance: " << inst.model().name() << " K=" << inst.num_arms()
            << " means=(";
  for (int i = 0; i < inst.num_arms(); ++i)
    std::cout << (i ? ", " : "") << fmt4(inst.mean(i));
  std::cout << ")\n";
  std::cout << "T*       = " << fmt4(ct.t_star) << '\n';
  print_weights(std::cout, "w*      ", ct.w_star);
  std::cout << "T^{1/2}  = " << fmt4(ct.t_half) << '\n';
  std::cout << "T_low    = " << fmt4(ct.t_lower) << '\n';
  print_weights(std::cout, "w_low   ", ct.w_lower);
  std::cout << "gamma    = " << fmt4(ct.gamma) << '\n';
  std::cout << "delta     LB        PLB\n";
  struct Row {
    double delta, lb;
    int64_t plb;
  };
  std::vector<Row> rows;
  for (double d : deltas) {
    const double lb = bai::lower_bound(inst, d);
    const int64_t plb = bai::practical_lower_bound(inst, d, heuristic);
    rows.push_back(Row{d, lb, plb});
    std::cout << fmt4(d) << "      " << fmt4(lb) << "      " << plb << '\n';
  }

  if (!csv_path.empty()) {
    std::ostringstream os;
    os << "quantity,value\n";
    os << "t_star," << fmt_full(ct.t_star) << '\n';
    os << "t_half," << fmt_full(ct.t_half) << '\n';
    os << "t_lower," << fmt_full(ct.t_lower) << '\n';
    os << "gamma," << fmt_full(ct.gamma) << '\n';
    os << "y_star," << fmt_full(ct.y_star) << '\n';
    os << "y_lower," << fmt_full(ct.y_lower) << '\n';
    for (int i = 0; i < ct.w_star.size(); ++i)
      os << "w_star_" << i << ',' << fmt_full(ct.w_star[i]) << '\n';
    for (int i = 0; i < ct.w_lower.size(); ++i)
      os << "w_lower_" << i << ',' << fmt_full(ct.w_lower[i]) << '\n';
    for (const Row& r : rows) {
      os << "lb_" << fmt_full(r.delta) << ',' << fmt_full(r.lb) << '\n';
      os << "plb_" << fmt_full(r.delta) << ',' << r.plb << '\n';
    }
    write_file(csv_path, os.str());
  }
  return kExitOk;
}

int cmd_run(bai::ParsedConfig parsed) {
  parsed.experiment.validate();
  const fs::path out_dir(parsed.out_dir);
  fs::create_directories(out_dir);

  const std::vector<bai::RunRecord> records = bai::run_experiment(parsed.experiment);
  const std::vector<bai::Aggregate> aggregates =
      bai::aggregate_records(parsed.experiment, records);

  // Stage everything, then move into place so an abort leaves no partial files.
  std::vector<std::pair<fs::path, std::string>> outputs;
  outputs.emplace_back(out_dir / "effective_config.ini", bai::dump_config(parsed));
  if (parsed.write_records)
    outputs.emplace_back(out_dir / "records.ndjson", bai::records_to_ndjson(records));
  if (parsed.write_aggregates)
    outputs.emplace_back(out_dir / "aggregates.csv",
                         bai::aggregates_to_csv(parsed.experiment, aggregates));
  for (const auto& [path, text] : outputs) {
    const fs::path tmp = path.string() + ".tmp";
    write_file(tmp, text);
    fs::rename(tmp, path);
  }

  int truncated = 0;
  for (const bai::RunRecord& r : records) truncated += r.truncated ? 1 : 0;
  std::cout << records.size() << " runs -> " << out_dir.string() << " (" << truncated
            << " truncated)\n";
  for (const bai::Aggregate& a : aggregates)
    std::cout << a.policy << " delta=" << fmt4(a.delta) << ": mean tau "
              << fmt4(a.mean_tau) << " +- " << fmt4(a.stderr_tau) << ", error rate "
              << fmt4(a.error_rate) << (a.truncated ? " [truncations!]" : "") << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& family, const std::string& models_csv, int k_min,
              int k_max, int k_step, double sigma2, double scale,
              const std::string& out_path) {
  std::vector<bai::Model> models;
  std::string item;
  std::istringstream is(models_csv);
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    try {
      models.push_back(bai::Model::from_name(item, sigma2, scale));
    } catch (const std::invalid_argument& e) {
      throw bai::ConfigError(e.what());
    }
  }
  if (models.empty()) throw bai::ConfigError("--models: empty list");

  bai::RatioSweepResult sweep;
  try {
    sweep = bai::ratio_sweep(models, bai::family_from_name(family), k_min, k_max, k_step);
  } catch (const std::invalid_argument& e) {
    throw bai::ConfigError(e.what());
  }
  const std::string csv = bai::ratio_rows_to_csv(sweep);
  if (out_path.empty())
    std::cout << csv;
  else
    write_file(out_path, csv);
  for (const auto& [model, k] : sweep.skipped)
    std::cerr << "skipped " << model << " K=" << k << " (means left the domain)\n";
  return kExitOk;
}

int cmd_validate() {
  const std::vector<bai::CheckResult> results = bai::run_validation_suite();
  bool all_pass = true;
  for (const bai::CheckResult& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << '\n';
    all_pass = all_pass && r.pass;
  }
  if (!all_pass) {
    std::cerr << "validation failed\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-confidence best-arm identification for SPEF bandits"};
  app.require_subcommand(1);

  // times
  auto* times = app.add_subcommand("times", "characteristic times of an instance");
  InstanceFlags times_flags;
  add_instance_flags(times, times_flags);
  std::string times_deltas = "0.2,0.1,0.01,0.001";
  std::string times_csv;
  times->add_option("--deltas", times_deltas, "deltas for the LB/PLB table");
  times->add_option("--csv", times_csv, "also write a full-precision CSV here");

  // run
  auto* run = app.add_subcommand("run", "run a replicated stopping experiment");
  std::string run_config;
  InstanceFlags run_flags;
  add_instance_flags(run, run_flags);
  std::string run_policies = "bcte";
  std::string run_deltas = "0.1";
  int run_n = 100;
  uint64_t run_seed = 1;
  std::string run_threshold = "heuristic";
  int64_t run_horizon = 1'000'000;
  int run_workers = -1;
  std::string run_out = "out";
  bool run_no_records = false;
  run->add_option("--config", run_config, "INI config file (flags override nothing)");
  run->add_option("--policies", run_policies, "bcte|rr|tasd|t3c[:beta], comma-separated");
  run->add_option("--deltas", run_deltas, "comma-separated risk levels");
  run->add_option("--runs", run_n, "replications per (policy, delta)");
  run->add_option("--seed", run_seed, "master seed");
  run->add_option("--threshold", run_threshold, "heuristic | deviational:<c>:<alpha>");
  run->add_option("--horizon-cap", run_horizon, "truncation cap per run");
  run->add_option("--workers", run_workers, "worker threads (default: BAI_WORKERS or all cores)");
  run->add_option("--out", run_out, "output directory");
  run->add_flag("--no-records", run_no_records, "skip the per-run NDJSON file");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "characteristic-time ratio sweep over K");
  std::string sweep_family = "mu1";
  std::string sweep_models = "bernoulli,gaussian,poisson,exponential";
  int sweep_kmin = 2, sweep_kmax = 50, sweep_kstep = 1;
  double sweep_sigma2 = 1.0, sweep_scale = 1.0;
  std::string sweep_out;
  sweep->add_option("--family", sweep_family, "mu1 | mu2 | worst");
  sweep->add_option("--models", sweep_models, "comma-separated model names");
  sweep->add_option("--kmin", sweep_kmin, "smallest K");
  sweep->add_option("--kmax", sweep_kmax, "largest K");
  sweep->add_option("--kstep", sweep_kstep, "K stride");
  sweep->add_option("--sigma2", sweep_sigma2, "Gaussian variance");
  sweep->add_option("--scale", sweep_scale, "Pareto scale");
  sweep->add_option("--out", sweep_out, "CSV path (stdout when omitted)");

  // validate
  app.add_subcommand("validate", "run the invariant property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (times->parsed()) return cmd_times(times_flags, times_deltas, times_csv);
    if (run->parsed()) {
      bai::ParsedConfig parsed = [&]() {
        if (!run_config.empty()) return bai::parse_config_file(run_config);
        bai::ParsedConfig p{bai::ExperimentConfig{run_flags.build(), {}, {}}};
        for (const std::string& label : [&] {
               std::vector<std::string> out;
               std::string tok;
               std::istringstream is(run_policies);
               while (std::getline(is, tok, ','))
                 if (!tok.empty()) out.push_back(tok);
               return out;
             }()) {
          try {
            p.experiment.policies.push_back(bai::PolicyKind::from_label(label));
          } catch (const std::invalid_argument& e) {
            throw bai::ConfigError(e.what());
          }
        }
        p.experiment.deltas = parse_number_list(run_deltas, "--deltas");
        p.experiment.n_runs = run_n;
        p.experiment.master_seed = run_seed;
        p.experiment.threshold = parse_threshold_flag(run_threshold);
        p.experiment.horizon_cap = run_horizon;
        p.out_dir = run_out;
        p.write_records = !run_no_records;
        return p;
      }();
      parsed.experiment.workers =
          run_workers >= 0 ? run_workers : default_workers_from_env();
      return cmd_run(std::move(parsed));
    }
    if (sweep->parsed())
      return cmd_sweep(sweep_family, sweep_models, sweep_kmin, sweep_kmax, sweep_kstep,
                       sweep_sigma2, sweep_scale, sweep_out);
    return cmd_validate();
  } catch (const bai::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bai::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
