#pragma once

#include <cstdint>

#include "bai/policies.hpp"

namespace bai {

// Stopping threshold beta(t, delta).
//   HeuristicLogLog: log((log(t) + 1) / delta)
//   Deviational:     log(c * t^alpha / delta), alpha in [1, e/2]
struct Threshold {
  enum class Kind { HeuristicLogLog, Deviational };

  Kind kind = Kind::HeuristicLogLog;
  double c = 1.0;
  double alpha = 1.2;

  static Threshold heuristic() { return Threshold{}; }
  static Threshold deviational(double c, double alpha);
};

double threshold_value(const Threshold& kind, int64_t t, double delta);

struct GlrResult {
  double statistic;
  int best;  // outer argmax arm = empirical best (lowest index on ties)
};

// Chernoff GLR statistic max_a min_b t f_{a,b}(w^t; mu-hat). The outer max is
// attained at the empirical best arm, so only that arm's inner min is
// evaluated; glr_statistic_full_maxmin below computes the full signed max-min
// and the two must agree. Exact ties at the empirical top give 0. Requires
// every arm to have at least one observation.
GlrResult glr_statistic(const HistoryState& history);

// Signed form: Z_{a,b} = +t f_{a,b} when mu-hat_a >= mu-hat_b, else -t f_{b,a};
// returns max_a min_{b != a} Z_{a,b}.
double glr_statistic_full_maxmin(const HistoryState& history);

struct StoppingDecision {
  bool stop;
  int recommended;
  double statistic;
  double threshold;
};

StoppingDecision should_stop(const HistoryState& history, const Threshold& kind,
                             double delta);

}  // namespace bai
