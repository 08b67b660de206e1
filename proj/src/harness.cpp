#include "bai/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "bai/errors.hpp"

namespace bai {

namespace {

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return s / static_cast<double>(xs.size() - 1);
}

// kl(delta, 1 - delta), the binary relative entropy appearing in the tight
// sample-complexity lower bound.
double binary_kl_to_complement(double delta) {
  return delta * std::log(delta / (1.0 - delta)) +
         (1.0 - delta) * std::log((1.0 - delta) / delta);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("experiment: no policies given");
  if (deltas.empty()) throw ConfigError("experiment: no deltas given");
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("experiment: delta must lie in (0,1)");
  for (size_t i = 0; i < deltas.size(); ++i)
    for (size_t j = i + 1; j < deltas.size(); ++j)
      if (deltas[i] == deltas[j]) throw ConfigError("experiment: deltas must be distinct");
  if (n_runs < 1) throw ConfigError("experiment: n_runs must be at least 1");
  if (horizon_cap < 2 * instance.num_arms())
    throw ConfigError("experiment: horizon_cap must be at least 2K");
  if (workers < 0) throw ConfigError("experiment: workers must be nonnegative");
}

uint64_t derive_run_seed(uint64_t master_seed, const PolicyKind& policy, double delta,
                         int run_index) {
  uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ policy.seed_tag());
  s = splitmix64(s ^ std::bit_cast<uint64_t>(delta));
  s = splitmix64(s ^ static_cast<uint64_t>(run_index));
  return s;
}

RunRecord run_once(const Instance& inst, const PolicyKind& policy,
                   const Threshold& threshold, double delta, int64_t horizon_cap,
                   uint64_t master_seed, int run_index) {
  const int k = inst.num_arms();
  RandomStream rng(derive_run_seed(master_seed, policy, delta, run_index));
  HistoryState history(inst.model(), k);

  RunRecord rec;
  rec.policy = policy.label();
  rec.delta = delta;
  rec.run_index = run_index;

  const auto start = std::chrono::steady_clock::now();
  while (history.total_plays() < horizon_cap) {
    const SelectDetail sel = select_arm_detail(policy, history, rng);
    const double reward = inst.model().sample(inst.mean(sel.arm), rng);
    history.record(sel.arm, reward);
    if (sel.thompson_exploration) rec.te_rounds += 1;
    if (history.total_plays() < 2 * k) continue;  // initialization
    const StoppingDecision decision = should_stop(history, threshold, delta);
    if (decision.stop) {
      rec.tau = history.total_plays();
      rec.recommended = decision.recommended;
      rec.correct = decision.recommended == inst.best_arm();
      break;
    }
  }
  if (rec.tau == 0) {  // never crossed the threshold: truncated failure
    rec.tau = horizon_cap;
    rec.recommended = history.empirical_best();
    rec.correct = false;
    rec.truncated = true;
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  rec.wall_ns_per_step =
      std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count() / rec.tau;
  return rec;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  struct Task {
    PolicyKind policy;
    double delta;
    int run_index;
  };
  std::vector<Task> tasks;
  for (const PolicyKind& p : config.policies)
    for (double d : config.deltas)
      for (int r = 0; r < config.n_runs; ++r) tasks.push_back(Task{p, d, r});

  std::vector<RunRecord> records(tasks.size());
  std::atomic<size_t> next{0};
  std::mutex failure_mutex;
  size_t first_failed = tasks.size();
  std::string failure_message;

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));

  const auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      const Task& task = tasks[idx];
      try {
        records[idx] = run_once(config.instance, task.policy, config.threshold,
                                task.delta, config.horizon_cap, config.master_seed,
                                task.run_index);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (idx < first_failed) {
          first_failed = idx;
          std::ostringstream os;
          os << "run failed (policy=" << task.policy.label() << ", delta=" << task.delta
             << ", run=" << task.run_index << ", seed="
             << derive_run_seed(config.master_seed, task.policy, task.delta,
                                task.run_index)
             << "): " << e.what();
          failure_message = os.str();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  if (first_failed < tasks.size()) throw std::runtime_error(failure_message);
  return records;
}

std::vector<Aggregate> aggregate_records(const ExperimentConfig& config,
                                         const std::vector<RunRecord>& records) {
  std::vector<Aggregate> out;
  // Completed-run tau samples per cell, for the pairwise Welch tests.
  std::map<std::pair<std::string, double>, std::vector<double>> taus;
  for (const RunRecord& r : records)
    if (!r.truncated)
      taus[{r.policy, r.delta}].push_back(static_cast<double>(r.tau));

  for (double delta : config.deltas) {
    for (const PolicyKind& p : config.policies) {
      Aggregate agg;
      agg.policy = p.label();
      agg.delta = delta;
      int errors = 0;
      for (const RunRecord& r : records) {
        if (r.policy != agg.policy || r.delta != delta) continue;
        if (r.truncated) {
          agg.truncated += 1;
          continue;
        }
        agg.n += 1;
        if (!r.correct) errors += 1;
      }
      const std::vector<double>& mine = taus[{agg.policy, delta}];
      if (!mine.empty()) {
        agg.mean_tau = mean_of(mine);
        if (mine.size() > 1) {
          agg.std_tau = std::sqrt(sample_variance(mine, agg.mean_tau));
          agg.stderr_tau = agg.std_tau / std::sqrt(static_cast<double>(mine.size()));
        }
        agg.error_rate = static_cast<double>(errors) / static_cast<double>(agg.n);
      }
      for (const PolicyKind& q : config.policies) {
        if (q.label() == agg.policy) continue;
        const std::vector<double>& theirs = taus[{q.label(), delta}];
        double p_value = std::numeric_limits<double>::quiet_NaN();
        if (mine.size() >= 2 && theirs.size() >= 2) {
          try {
            p_value = welch_one_sided(mine, theirs, 0.05).p_value;
          } catch (const std::invalid_argument&) {
            // degenerate samples: leave NaN
          }
        }
        agg.welch_vs[q.label()] = p_value;
      }
      out.push_back(std::move(agg));
    }
  }
  return out;
}

double lower_bound(const Instance& inst, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("lower_bound: delta must lie in (0,1)");
  return t_star(inst) * binary_kl_to_complement(delta);
}

int64_t practical_lower_bound(const Instance& inst, double delta,
                              const Threshold& threshold) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("practical_lower_bound: delta must lie in (0,1)");
  const WStarResult ws = solve_w_star(inst);
  const double g = g_value(ws.w, inst);
  const auto crossed = [&](int64_t t) {
    return static_cast<double>(t) * g >= threshold_value(threshold, t, delta);
  };
  int64_t hi = 1;
  while (!crossed(hi)) {
    hi *= 2;
    if (hi > (int64_t{1} << 60)) throw SolverError("practical_lower_bound: no crossing");
  }
  int64_t lo = hi / 2;  // lo not crossed (or hi == 1)
  while (lo + 1 < hi) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (crossed(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

WelchResult welch_one_sided(std::span<const double> a, std::span<const double> b,
                            double alpha) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("welch_one_sided: both samples need >= 2 points");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  const double va = sample_variance(a, ma);
  const double vb = sample_variance(b, mb);
  if (va == 0.0 && vb == 0.0)
    throw std::invalid_argument("welch_one_sided: both samples have zero variance");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double se2 = va / na + vb / nb;
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 / ((va / na) * (va / na) / (na - 1.0) +
                                 (vb / nb) * (vb / nb) / (nb - 1.0));
  const boost::math::students_t dist(df);
  const double p = boost::math::cdf(dist, t);  // alternative: mean(a) < mean(b)
  return WelchResult{p, p < alpha, t, df};
}

std::vector<double> family_means(InstanceFamily family, int k) {
  if (k < 2) throw std::invalid_argument("family_means: K must be at least 2");
  std::vector<double> means;
  means.reserve(static_cast<size_t>(k));
  switch (family) {
    case InstanceFamily::Mu1:
    case InstanceFamily::Mu2: {
      const double top = family == InstanceFamily::Mu1 ? 0.3 : 0.9;
      const double second = family == InstanceFamily::Mu1 ? 0.21 : 0.7;
      means.push_back(top);
      for (int j = 2; j <= k; ++j)
        means.push_back(second - 0.001 * static_cast<double>(j - 2));
      break;
    }
    case InstanceFamily::WorstCase:
      means.push_back(0.3);
      means.insert(means.end(), static_cast<size_t>(k - 1), 0.21);
      break;
  }
  return means;
}

InstanceFamily family_from_name(const std::string& name) {
  if (name == "mu1") return InstanceFamily::Mu1;
  if (name == "mu2") return InstanceFamily::Mu2;
  if (name == "worst") return InstanceFamily::WorstCase;
  throw std::invalid_argument("unknown instance family '" + name + "'");
}

RatioSweepResult ratio_sweep(std::span<const Model> models, InstanceFamily family,
                             int k_min, int k_max, int k_step) {
  if (k_min < 2 || k_max < k_min || k_step < 1)
    throw std::invalid_argument("ratio_sweep: bad K range");
  RatioSweepResult result;
  for (const Model& model : models) {
    for (int k = k_min; k <= k_max; k += k_step) {
      const std::vector<double> means = family_means(family, k);
      const bool ok = std::all_of(means.begin(), means.end(),
                                  [&](double m) { return model.in_open_domain(m); });
      if (!ok) {
        result.skipped.emplace_back(model.name(), k);
        continue;
      }
      const Instance inst(model, means);
      const double ts = t_star(inst);
      const double tl = t_lower(inst).t;
      const double th = t_beta(inst, 0.5);
      result.rows.push_back(RatioRow{model.name(), k, tl / ts, th / ts});
    }
  }
  return result;
}

std::string records_to_ndjson(const std::vector<RunRecord>& records) {
  std::string out;
  for (const RunRecord& r : records) {
    nlohmann::json j{{"policy", r.policy},
                     {"delta", r.delta},
                     {"run_index", r.run_index},
                     {"tau", r.tau},
                     {"recommended", r.recommended},
                     {"correct", r.correct},
                     {"truncated", r.truncated},
                     {"te_rounds", r.te_rounds},
                     {"wall_ns_per_step", r.wall_ns_per_step}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string aggregates_to_csv(const ExperimentConfig& config,
                              const std::vector<Aggregate>& aggregates) {
  std::ostringstream os;
  os << "policy,delta,n,mean_tau,std_tau,stderr,error_rate,truncated";
  for (const PolicyKind& p : config.policies) os << ",welch_vs_" << p.label();
  os << '\n';
  for (const Aggregate& a : aggregates) {
    os << a.policy << ',' << fmt_full(a.delta) << ',' << a.n << ','
       << fmt_full(a.mean_tau) << ',' << fmt_full(a.std_tau) << ','
       << fmt_full(a.stderr_tau) << ',' << fmt_full(a.error_rate) << ','
       << a.truncated;
    for (const PolicyKind& p : config.policies) {
      os << ',';
      if (p.label() == a.policy) continue;  // self: blank
      const auto it = a.welch_vs.find(p.label());
      if (it != a.welch_vs.end() && !std::isnan(it->second)) os << fmt_full(it->second);
    }
    os << '\n';
  }
  return os.str();
}

std::string ratio_rows_to_csv(const RatioSweepResult& sweep) {
  std::ostringstream os;
  os << "model,K,ratio_lower,ratio_half\n";
  for (const RatioRow& row : sweep.rows)
    os << row.model << ',' << row.k << ',' << fmt_full(row.ratio_lower) << ','
       << fmt_full(row.ratio_half) << '\n';
  return os.str();
}

}  // namespace bai
