#pragma once

#include <string>

#include "bai/harness.hpp"

namespace bai {

// Parsed experiment configuration file. INI-style sections:
//
//   [instance]
//   model = bernoulli            # bernoulli|gaussian|poisson|exponential|pareto
//   sigma2 = 1.0                 # gaussian only
//   scale = 1.0                  # pareto only
//   means = 0.3, 0.21, 0.2
//
//   [experiment]
//   policies = bcte, rr          # bcte|rr|tasd|t3c|t3c:<beta>
//   deltas = 0.1, 0.01
//   n_runs = 1000
//   master_seed = 1
//   threshold = heuristic        # heuristic | deviational <c> <alpha>
//   horizon_cap = 1000000
//   workers = 0
//
//   [output]
//   directory = out
//   formats = records, aggregates
//
// Unknown sections or keys are rejected; parse errors name the line and field.
struct ParsedConfig {
  ExperimentConfig experiment;
  std::string out_dir = "out";
  bool write_records = true;
  bool write_aggregates = true;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

// Effective config as text; re-parsing reproduces the run (full precision).
std::string dump_config(const ParsedConfig& config);

}  // namespace bai
