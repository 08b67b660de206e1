#include "bai/stopping.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bai/characteristic.hpp"

namespace bai {

Threshold Threshold::deviational(double c, double alpha) {
  if (!(c > 0.0)) throw std::invalid_argument("deviational threshold: c must be positive");
  if (!(alpha >= 1.0 && alpha <= std::exp(1.0) / 2.0))
    throw std::invalid_argument("deviational threshold: alpha must lie in [1, e/2]");
  Threshold t;
  t.kind = Kind::Deviational;
  t.c = c;
  t.alpha = alpha;
  return t;
}

double threshold_value(const Threshold& kind, int64_t t, double delta) {
  if (t < 1) throw std::invalid_argument("threshold: t must be at least 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("threshold: delta must lie in (0,1)");
  const double td = static_cast<double>(t);
  switch (kind.kind) {
    case Threshold::Kind::HeuristicLogLog:
      return std::log((std::log(td) + 1.0) / delta);
    case Threshold::Kind::Deviational:
      return std::log(kind.c * std::pow(td, kind.alpha) / delta);
  }
  return 0.0;
}

namespace {

void require_counts(const HistoryState& h) {
  for (int i = 0; i < h.num_arms(); ++i)
    if (h.count(i) < 1)
      throw std::invalid_argument("glr_statistic: every arm needs an observation");
}

}  // namespace

GlrResult glr_statistic(const HistoryState& h) {
  require_counts(h);
  const std::vector<double> means = h.empirical_means();
  const double t = static_cast<double>(h.total_plays());
  const int best = h.empirical_best();
  double stat = std::numeric_limits<double>::infinity();
  for (int b = 0; b < h.num_arms(); ++b) {
    if (b == best) continue;
    const double wa = static_cast<double>(h.count(best)) / t;
    const double wb = static_cast<double>(h.count(b)) / t;
    stat = std::min(stat, t * pair_cost(h.model(), means[static_cast<size_t>(best)],
                                        means[static_cast<size_t>(b)], wa, wb));
  }
  return GlrResult{stat, best};
}

double glr_statistic_full_maxmin(const HistoryState& h) {
  require_counts(h);
  const std::vector<double> means = h.empirical_means();
  const double t = static_cast<double>(h.total_plays());
  double out = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < h.num_arms(); ++a) {
    double inner = std::numeric_limits<double>::infinity();
    for (int b = 0; b < h.num_arms(); ++b) {
      if (b == a) continue;
      const double wa = static_cast<double>(h.count(a)) / t;
      const double wb = static_cast<double>(h.count(b)) / t;
      const double cost = t * pair_cost(h.model(), means[static_cast<size_t>(a)],
                                        means[static_cast<size_t>(b)], wa, wb);
      const double z = means[static_cast<size_t>(a)] >= means[static_cast<size_t>(b)]
                           ? cost
                           : -cost;
      inner = std::min(inner, z);
    }
    out = std::max(out, inner);
  }
  return out;
}

StoppingDecision should_stop(const HistoryState& history, const Threshold& kind,
                             double delta) {
  const GlrResult glr = glr_statistic(history);
  const double thr = threshold_value(kind, history.total_plays(), delta);
  return StoppingDecision{glr.statistic > thr, glr.best, glr.statistic, thr};
}

}  // namespace bai
