#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bai/characteristic.hpp"
#include "bai/model.hpp"

namespace bai {

// Play counts and reward sums for one run. Empirical means live in the
// closure of the model's mean domain.
class HistoryState {
 public:
  HistoryState(Model model, int num_arms);

  void record(int arm, double reward);

  int64_t total_plays() const { return t_; }
  int num_arms() const { return static_cast<int>(obs_.size()); }
  const Model& model() const { return model_; }
  const ArmObservations& observations(int i) const { return obs_[static_cast<size_t>(i)]; }
  int64_t count(int i) const { return obs_[static_cast<size_t>(i)].count; }
  double empirical_mean(int i) const;            // requires count(i) > 0
  std::vector<double> empirical_means() const;   // requires all counts > 0
  std::vector<double> empirical_weights() const; // N_i(t) / t
  // Lowest-index argmax of the empirical means over arms with observations.
  int empirical_best() const;

 private:
  Model model_;
  std::vector<ArmObservations> obs_;
  int64_t t_ = 0;
};

struct PolicyKind {
  enum class Name { BCTE, RoundRobin, TaSD, T3C };

  Name name = Name::BCTE;
  double beta = 0.5;  // T3C leader probability

  static PolicyKind bcte() { return {Name::BCTE, 0.5}; }
  static PolicyKind round_robin() { return {Name::RoundRobin, 0.5}; }
  static PolicyKind tasd() { return {Name::TaSD, 0.5}; }
  static PolicyKind t3c(double beta = 0.5);

  std::string label() const;
  static PolicyKind from_label(const std::string& label);
  uint64_t seed_tag() const;

  bool operator==(const PolicyKind& o) const { return name == o.name && beta == o.beta; }
};

struct SelectDetail {
  int arm;
  int best;          // m(t), lowest-index empirical argmax
  int sampled_best;  // m~(t) for posterior-based policies, else == best
  bool thompson_exploration;
};

// Next arm under the given sampling rule. While any arm has fewer than two
// plays the initialization override applies for every policy: play the arm
// with the smallest count (lowest index on ties), giving two round-robin
// passes from a fresh history.
SelectDetail select_arm_detail(const PolicyKind& policy, const HistoryState& history,
                               RandomStream& rng);
int select_arm(const PolicyKind& policy, const HistoryState& history, RandomStream& rng);

struct TraceStep {
  int arm;
  double reward;
  int best;
  int sampled_best;
  bool thompson_exploration;
};

// Instrumented fixed-horizon run (no stopping rule). Deterministic given the
// seed; horizon must be at least 2K.
std::vector<TraceStep> run_trace(const PolicyKind& policy, const Instance& inst,
                                 int64_t horizon, uint64_t seed);
std::vector<TraceStep> bcte_trace(const Instance& inst, int64_t horizon, uint64_t seed);

}  // namespace bai
