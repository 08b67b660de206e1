#include "bai/policies.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bai {

namespace {

// Lowest-index argmax.
int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[static_cast<size_t>(i)] > v[static_cast<size_t>(best)]) best = i;
  return best;
}

// Among {a, b}, the one with fewer plays; lowest index on ties.
int less_played(const HistoryState& h, int a, int b) {
  if (a == b) return a;
  if (h.count(a) != h.count(b)) return h.count(a) < h.count(b) ? a : b;
  return std::min(a, b);
}

int init_arm(const HistoryState& h) {
  int pick = -1;
  for (int i = 0; i < h.num_arms(); ++i) {
    if (h.count(i) >= 2) continue;
    if (pick < 0 || h.count(i) < h.count(pick)) pick = i;
  }
  return pick;
}

SelectDetail select_bcte(const HistoryState& h, RandomStream& rng) {
  const int k = h.num_arms();
  std::vector<double> sampled(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    sampled[static_cast<size_t>(i)] = h.model().posterior_sample(h.observations(i), rng);
  const int m = h.empirical_best();
  const int m_tilde = argmax(sampled);
  if (m != m_tilde) {
    // Thompson exploration: the less-sampled of the two candidate best arms.
    return SelectDetail{less_played(h, m, m_tilde), m, m_tilde, true};
  }
  const std::vector<double> means = h.empirical_means();
  const std::vector<double> weights = h.empirical_weights();
  const std::vector<double> v = subgradient_at(h.model(), means, m, weights, 0.0);
  int pick = 0;
  for (int i = 1; i < k; ++i) {
    const double vi = v[static_cast<size_t>(i)];
    const double vp = v[static_cast<size_t>(pick)];
    if (vi > vp || (vi == vp && h.count(i) < h.count(pick))) pick = i;
  }
  return SelectDetail{pick, m, m_tilde, false};
}

SelectDetail select_tasd(const HistoryState& h) {
  const int k = h.num_arms();
  const int64_t t = h.total_plays();
  const double floor_level = std::sqrt(static_cast<double>(t)) - k / 2.0;
  int forced = -1;
  for (int i = 0; i < k; ++i) {
    if (static_cast<double>(h.count(i)) < floor_level &&
        (forced < 0 || h.count(i) < h.count(forced)))
      forced = i;
  }
  const int m = h.empirical_best();
  if (forced >= 0) return SelectDetail{forced, m, m, false};

  const std::vector<double> means = h.empirical_means();
  // w*(mu-hat) is undefined under a tied empirical best; play the least-sampled
  // arm among the maximizers instead.
  int tied = -1;
  for (int i = 0; i < k; ++i)
    if (i != m && means[static_cast<size_t>(i)] == means[static_cast<size_t>(m)])
      tied = tied < 0 ? less_played(h, m, i) : less_played(h, tied, i);
  if (tied >= 0) return SelectDetail{tied, m, m, false};

  const std::vector<double> w = w_star_at(h.model(), means, m, 1e-10);
  int pick = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    const double score =
        static_cast<double>(t) * w[static_cast<size_t>(i)] - static_cast<double>(h.count(i));
    if (score > best_score) {
      best_score = score;
      pick = i;
    }
  }
  return SelectDetail{pick, m, m, false};
}

SelectDetail select_t3c(const HistoryState& h, double beta, RandomStream& rng) {
  const int k = h.num_arms();
  std::vector<double> sampled(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    sampled[static_cast<size_t>(i)] = h.model().posterior_sample(h.observations(i), rng);
  const int leader = argmax(sampled);
  const int m = h.empirical_best();
  if (rng.uniform() < beta) return SelectDetail{leader, m, leader, false};
  const std::vector<double> means = h.empirical_means();
  const std::vector<double> weights = h.empirical_weights();
  int challenger = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    if (j == leader) continue;
    const double cost = pair_cost(h.model(), means[static_cast<size_t>(leader)],
                                  means[static_cast<size_t>(j)],
                                  weights[static_cast<size_t>(leader)],
                                  weights[static_cast<size_t>(j)]);
    if (cost < best_cost) {
      best_cost = cost;
      challenger = j;
    }
  }
  return SelectDetail{challenger, m, leader, false};
}

}  // namespace

HistoryState::HistoryState(Model model, int num_arms) : model_(model) {
  if (num_arms < 2) throw std::invalid_argument("HistoryState: need at least two arms");
  obs_.resize(static_cast<size_t>(num_arms));
}

void HistoryState::record(int arm, double reward) {
  if (arm < 0 || arm >= num_arms())
    throw std::invalid_argument("HistoryState::record: arm index out of range");
  ArmObservations& o = obs_[static_cast<size_t>(arm)];
  o.count += 1;
  o.sum += reward;
  if (model_.family() == Family::Pareto) o.sum_log += std::log(reward);
  t_ += 1;
}

double HistoryState::empirical_mean(int i) const {
  const ArmObservations& o = obs_[static_cast<size_t>(i)];
  if (o.count == 0)
    throw std::invalid_argument("empirical_mean: arm has no observations");
  return o.sum / static_cast<double>(o.count);
}

std::vector<double> HistoryState::empirical_means() const {
  std::vector<double> m(static_cast<size_t>(num_arms()));
  for (int i = 0; i < num_arms(); ++i) m[static_cast<size_t>(i)] = empirical_mean(i);
  return m;
}

std::vector<double> HistoryState::empirical_weights() const {
  std::vector<double> w(static_cast<size_t>(num_arms()));
  for (int i = 0; i < num_arms(); ++i)
    w[static_cast<size_t>(i)] =
        static_cast<double>(count(i)) / static_cast<double>(t_);
  return w;
}

int HistoryState::empirical_best() const {
  int best = -1;
  for (int i = 0; i < num_arms(); ++i) {
    if (count(i) == 0) continue;
    if (best < 0 || empirical_mean(i) > empirical_mean(best)) best = i;
  }
  if (best < 0) throw std::invalid_argument("empirical_best: no observations yet");
  return best;
}

PolicyKind PolicyKind::t3c(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("t3c: beta must lie in (0,1)");
  return {Name::T3C, beta};
}

std::string PolicyKind::label() const {
  switch (name) {
    case Name::BCTE: return "bcte";
    case Name::RoundRobin: return "rr";
    case Name::TaSD: return "tasd";
    case Name::T3C: return "t3c";
  }
  return "?";
}

PolicyKind PolicyKind::from_label(const std::string& label) {
  if (label == "bcte") return bcte();
  if (label == "rr" || label == "roundrobin") return round_robin();
  if (label == "tasd") return tasd();
  if (label == "t3c") return t3c();
  if (label.rfind("t3c:", 0) == 0) return t3c(std::stod(label.substr(4)));
  throw std::invalid_argument("unknown policy '" + label + "'");
}

uint64_t PolicyKind::seed_tag() const {
  uint64_t tag = static_cast<uint64_t>(name) + 1;
  if (name == Name::T3C) tag ^= splitmix64(std::bit_cast<uint64_t>(beta));
  return tag;
}

SelectDetail select_arm_detail(const PolicyKind& policy, const HistoryState& history,
                               RandomStream& rng) {
  const int pending = init_arm(history);
  if (pending >= 0) return SelectDetail{pending, pending, pending, false};
  switch (policy.name) {
    case PolicyKind::Name::BCTE:
      return select_bcte(history, rng);
    case PolicyKind::Name::RoundRobin: {
      const int arm = static_cast<int>(history.total_plays() % history.num_arms());
      const int m = history.empirical_best();
      return SelectDetail{arm, m, m, false};
    }
    case PolicyKind::Name::TaSD:
      return select_tasd(history);
    case PolicyKind::Name::T3C:
      return select_t3c(history, policy.beta, rng);
  }
  throw std::invalid_argument("select_arm: unknown policy");
}

int select_arm(const PolicyKind& policy, const HistoryState& history, RandomStream& rng) {
  return select_arm_detail(policy, history, rng).arm;
}

std::vector<TraceStep> run_trace(const PolicyKind& policy, const Instance& inst,
                                 int64_t horizon, uint64_t seed) {
  if (horizon < 2 * inst.num_arms())
    throw std::invalid_argument("run_trace: horizon must be at least 2K");
  RandomStream rng(seed);
  HistoryState history(inst.model(), inst.num_arms());
  std::vector<TraceStep> steps;
  steps.reserve(static_cast<size_t>(horizon));
  for (int64_t t = 0; t < horizon; ++t) {
    const SelectDetail sel = select_arm_detail(policy, history, rng);
    const double reward = inst.model().sample(inst.mean(sel.arm), rng);
    history.record(sel.arm, reward);
    steps.push_back(TraceStep{sel.arm, reward, sel.best, sel.sampled_best,
                              sel.thompson_exploration});
  }
  return steps;
}

std::vector<TraceStep> bcte_trace(const Instance& inst, int64_t horizon, uint64_t seed) {
  return run_trace(PolicyKind::bcte(), inst, horizon, seed);
}

}  // namespace bai
