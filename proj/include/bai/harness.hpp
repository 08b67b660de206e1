#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bai/characteristic.hpp"
#include "bai/model.hpp"
#include "bai/policies.hpp"
#include "bai/stopping.hpp"

namespace bai {

struct ExperimentConfig {
  Instance instance;
  std::vector<PolicyKind> policies;
  std::vector<double> deltas;
  int n_runs = 1;
  uint64_t master_seed = 1;
  Threshold threshold;
  int64_t horizon_cap = 1'000'000;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;  // throws ConfigError
};

struct RunRecord {
  std::string policy;
  double delta = 0.0;
  int run_index = 0;
  int64_t tau = 0;
  int recommended = -1;
  bool correct = false;
  bool truncated = false;
  int64_t te_rounds = 0;
  int64_t wall_ns_per_step = 0;
};

// Stream seed for one run; documented splitmix64 chain over
// (master_seed, policy tag, delta bits, run index).
uint64_t derive_run_seed(uint64_t master_seed, const PolicyKind& policy, double delta,
                         int run_index);

// One policy run to stopping (or to the horizon cap, which is recorded as a
// truncated failure).
RunRecord run_once(const Instance& inst, const PolicyKind& policy,
                   const Threshold& threshold, double delta, int64_t horizon_cap,
                   uint64_t master_seed, int run_index);

// Fan-out over (policy x delta x run_index). Output order is by task index,
// independent of worker count; every field except wall_ns_per_step is a pure
// function of the config. A failed run aborts with (policy, delta, run) context.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

struct Aggregate {
  std::string policy;
  double delta = 0.0;
  int n = 0;  // completed (non-truncated) runs
  double mean_tau = 0.0;
  double std_tau = 0.0;
  double stderr_tau = 0.0;
  double error_rate = 0.0;  // over completed runs
  int truncated = 0;
  // One-sided Welch p-value that this policy's mean tau is smaller, per rival.
  std::map<std::string, double> welch_vs;
};

std::vector<Aggregate> aggregate_records(const ExperimentConfig& config,
                                         const std::vector<RunRecord>& records);

// Sample-complexity reference lines. LB is T*(mu) kl(delta, 1-delta) with kl
// the binary relative entropy (the tight lower-bound constant; the paper's
// tables are computed with it). PLB is the first round t where
// t g(w*; mu) >= beta(t, delta).
double lower_bound(const Instance& inst, double delta);
int64_t practical_lower_bound(const Instance& inst, double delta,
                              const Threshold& threshold);

struct WelchResult {
  double p_value;
  bool significant;
  double t_stat;
  double df;
};

// One-sided Welch t-test with Welch-Satterthwaite degrees of freedom;
// alternative: mean(a) < mean(b). Both samples need >= 2 points and at least
// one positive variance.
WelchResult welch_one_sided(std::span<const double> a, std::span<const double> b,
                            double alpha);

enum class InstanceFamily { Mu1, Mu2, WorstCase };

// Mu1: (0.3, 0.21, 0.21 - 0.001, ..., 0.21 - 0.001 (K-2));
// Mu2: same shape from (0.9, 0.7); WorstCase: (0.3, 0.21, ..., 0.21).
std::vector<double> family_means(InstanceFamily family, int k);
InstanceFamily family_from_name(const std::string& name);

struct RatioRow {
  std::string model;
  int k;
  double ratio_lower;  // underline-T / T*
  double ratio_half;   // T^{1/2} / T*
};

struct RatioSweepResult {
  std::vector<RatioRow> rows;
  std::vector<std::pair<std::string, int>> skipped;  // means left the domain
};

RatioSweepResult ratio_sweep(std::span<const Model> models, InstanceFamily family,
                             int k_min, int k_max, int k_step = 1);

// Serialization: newline-delimited JSON run records; CSV aggregates with one
// welch_vs_<policy> column per policy in config order; ratio CSV.
std::string records_to_ndjson(const std::vector<RunRecord>& records);
std::string aggregates_to_csv(const ExperimentConfig& config,
                              const std::vector<Aggregate>& aggregates);
std::string ratio_rows_to_csv(const RatioSweepResult& sweep);

}  // namespace bai
