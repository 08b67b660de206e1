#include "bai/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bai/errors.hpp"

namespace bai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxBisectIters = 200;

// k_i on raw means: transportation cost at allocation (1, x).
double k_at(const Model& model, double mu_best, double mu_i, double x) {
  return pair_cost(model, mu_best, mu_i, 1.0, x);
}

// Bisection for the unique upward crossing of fn through `target` on [lo, hi].
// The bracket is verified up front (fn(lo) <= target <= fn(hi)), so the only
// exits are a root located to full double precision or an iteration-cap
// failure, reported with the residual. Empirical-mean states can make fn jump
// past the target between adjacent doubles; with a verified bracket the
// exhausted midpoint is then the best representable root and is accepted.
template <class Fn>
double bisect_crossing(Fn&& fn, double lo, double hi, double target, double tol,
                       const char* what) {
  const double flo = fn(lo);
  const double fhi = fn(hi);
  if (!(flo <= target) || !(fhi >= target)) {
    std::ostringstream os;
    os << what << ": crossing not bracketed (f(" << lo << ")=" << flo << ", f(" << hi
       << ")=" << fhi << ", target=" << target << ")";
    throw SolverError(os.str());
  }
  bool exhausted = false;
  for (int it = 0; it < kMaxBisectIters; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      exhausted = true;
      break;
    }
    if (fn(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  const double x = 0.5 * (lo + hi);
  const double resid = std::abs(fn(x) - target);
  if (!exhausted && !(resid <= tol * std::max(1.0, std::abs(target)))) {
    std::ostringstream os;
    os << what << ": residual " << resid << " above tolerance " << tol
       << " after iteration cap";
    throw SolverError(os.str());
  }
  return x;
}

double l_inverse_at(const Model& model, double mu_best, double mu_i, double y,
                    double tol) {
  if (y < 0.0) throw std::invalid_argument("l_inverse: y must be nonnegative");
  const double y_sup = model.kl(mu_best, mu_i);
  if (y >= y_sup)
    throw std::invalid_argument("l_inverse: y outside the range of k_i");
  if (y == 0.0) return 0.0;
  // Grow the bracket until k exceeds y. k increases from 0 through y exactly
  // once below its supremum, so the crossing is unique.
  double hi = 1.0;
  while (k_at(model, mu_best, mu_i, hi) <= y) {
    hi *= 2.0;
    if (hi > 1e30) throw SolverError("l_inverse: bracket growth failed");
  }
  return bisect_crossing(
      [&](double x) { return k_at(model, mu_best, mu_i, x); }, 0.0, hi, y, tol,
      "l_inverse");
}

// F_mu(y) = sum_{i != best} d(mu_best, m_i) / d(mu_i, m_i) at x_i = l_i(y).
double big_f_at(const Model& model, std::span<const double> means, int best,
                double y) {
  const double mu_best = means[static_cast<size_t>(best)];
  double total = 0.0;
  for (int i = 0; i < static_cast<int>(means.size()); ++i) {
    if (i == best) continue;
    const double mu_i = means[static_cast<size_t>(i)];
    const double x = l_inverse_at(model, mu_best, mu_i, y, 1e-13);
    const double m = weighted_mean(mu_best, mu_i, 1.0, x);
    const double den = model.kl(mu_i, m);
    // As y approaches d(mu_best, mu_i) the denominator is a vanishing
    // difference and its float evaluation can land at or below zero while the
    // true ratio blows up. That region lies strictly above the F = 1 root, so
    // treating it as +infinity keeps every bisection decision correct.
    if (!(den > 0.0)) return kInf;
    total += model.kl(mu_best, m) / den;
  }
  return total;
}

int second_best_of(std::span<const double> means, int best) {
  int second = best == 0 ? 1 : 0;
  for (int i = 0; i < static_cast<int>(means.size()); ++i)
    if (i != best && means[static_cast<size_t>(i)] > means[static_cast<size_t>(second)])
      second = i;
  return second;
}

void check_arm(int i, int k, const char* what) {
  if (i < 0 || i >= k) throw std::invalid_argument(std::string(what) + ": arm index out of range");
}

}  // namespace

Weights::Weights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("Weights: empty vector");
  double total = 0.0;
  for (double v : w_) {
    if (!(v >= 0.0)) throw std::invalid_argument("Weights: negative entry");
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("Weights: entries sum to zero");
  for (double& v : w_) v /= total;
}

double pair_cost(const Model& model, double mu_a, double mu_b, double w_a, double w_b) {
  if (w_a + w_b <= 0.0) return 0.0;
  if (mu_a == mu_b) return 0.0;
  const double m = weighted_mean(mu_a, mu_b, w_a, w_b);
  // Skip zero-weight terms so 0 * inf cannot surface at domain boundaries.
  double cost = 0.0;
  if (w_a > 0.0) cost += w_a * model.kl(mu_a, m);
  if (w_b > 0.0) cost += w_b * model.kl(mu_b, m);
  return cost;
}

double f_at(const Model& model, std::span<const double> means, int best, int i,
            std::span<const double> w) {
  return pair_cost(model, means[static_cast<size_t>(best)], means[static_cast<size_t>(i)],
                   w[static_cast<size_t>(best)], w[static_cast<size_t>(i)]);
}

double g_at(const Model& model, std::span<const double> means, int best,
            std::span<const double> w) {
  double out = kInf;
  for (int i = 0; i < static_cast<int>(means.size()); ++i)
    if (i != best) out = std::min(out, f_at(model, means, best, i, w));
  return out;
}

double f_value(int i, const Weights& w, const Instance& inst, int best) {
  check_arm(i, inst.num_arms(), "f_value");
  check_arm(best, inst.num_arms(), "f_value");
  if (i == best) throw std::invalid_argument("f_value: i must differ from the best arm");
  if (w.size() != inst.num_arms()) throw std::invalid_argument("f_value: weight length mismatch");
  return f_at(inst.model(), inst.means(), best, i, w.values());
}

double g_value(const Weights& w, const Instance& inst) {
  if (w.size() != inst.num_arms()) throw std::invalid_argument("g_value: weight length mismatch");
  return g_at(inst.model(), inst.means(), inst.best_arm(), w.values());
}

std::vector<double> subgradient_at(const Model& model, std::span<const double> means,
                                   int best, std::span<const double> w, double tie_tol) {
  const int k = static_cast<int>(means.size());
  std::vector<double> f(static_cast<size_t>(k), kInf);
  double fmin = kInf;
  for (int i = 0; i < k; ++i) {
    if (i == best) continue;
    f[static_cast<size_t>(i)] = f_at(model, means, best, i, w);
    fmin = std::min(fmin, f[static_cast<size_t>(i)]);
  }
  std::vector<int> challengers;
  for (int i = 0; i < k; ++i)
    if (i != best && f[static_cast<size_t>(i)] <= fmin + tie_tol) challengers.push_back(i);

  std::vector<double> v(static_cast<size_t>(k), 0.0);
  const double inv = 1.0 / static_cast<double>(challengers.size());
  for (int j : challengers) {
    const double m = weighted_mean(means[static_cast<size_t>(best)], means[static_cast<size_t>(j)],
                                   w[static_cast<size_t>(best)], w[static_cast<size_t>(j)]);
    v[static_cast<size_t>(best)] += inv * model.kl(means[static_cast<size_t>(best)], m);
    v[static_cast<size_t>(j)] = inv * model.kl(means[static_cast<size_t>(j)], m);
  }
  return v;
}

std::vector<double> subgradient(const Weights& w, const Instance& inst, double tie_tol) {
  if (w.size() != inst.num_arms())
    throw std::invalid_argument("subgradient: weight length mismatch");
  for (int i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0))
      throw std::invalid_argument("subgradient: w must be strictly interior to the simplex");
  return subgradient_at(inst.model(), inst.means(), inst.best_arm(), w.values(), tie_tol);
}

double k_value(int i, double x, const Instance& inst) {
  check_arm(i, inst.num_arms(), "k_value");
  if (i == inst.best_arm()) throw std::invalid_argument("k_value: i must differ from the best arm");
  if (!(x >= 0.0)) throw std::invalid_argument("k_value: x must be nonnegative");
  return k_at(inst.model(), inst.mean(inst.best_arm()), inst.mean(i), x);
}

double h_value(int i, double z, const Instance& inst) {
  check_arm(i, inst.num_arms(), "h_value");
  if (i == inst.best_arm()) throw std::invalid_argument("h_value: i must differ from the best arm");
  if (!(z >= 0.0 && z <= 1.0)) throw std::invalid_argument("h_value: z must lie in [0,1]");
  return pair_cost(inst.model(), inst.mean(inst.best_arm()), inst.mean(i), 1.0 - z, z);
}

double l_inverse(int i, double y, const Instance& inst, double tol) {
  check_arm(i, inst.num_arms(), "l_inverse");
  if (i == inst.best_arm())
    throw std::invalid_argument("l_inverse: i must differ from the best arm");
  if (!(tol > 0.0)) throw std::invalid_argument("l_inverse: tol must be positive");
  return l_inverse_at(inst.model(), inst.mean(inst.best_arm()), inst.mean(i), y, tol);
}

std::vector<double> w_star_at(const Model& model, std::span<const double> means,
                              int best, double tol) {
  const int k = static_cast<int>(means.size());
  const double mu_best = means[static_cast<size_t>(best)];
  const int second = second_best_of(means, best);
  const double d_gap = model.kl(mu_best, means[static_cast<size_t>(second)]);

  // F_mu is increasing with F(0) = 0 and F -> infinity at the right end of
  // k_2's range, so the root of F = 1 brackets inside [0, d(mu_1, mu_2)).
  // Empirical boundary states (e.g. Bernoulli mu-hat = 1 vs 0) can make that
  // gap infinite; grow the bracket until F exceeds 1 instead.
  double hi;
  if (std::isfinite(d_gap)) {
    hi = (1.0 - 1e-12) * d_gap;
  } else {
    hi = 1.0;
    while (big_f_at(model, means, best, hi) < 1.0) {
      hi *= 2.0;
      if (hi > 1e30) throw SolverError("solve_w_star: bracket growth failed");
    }
  }
  const double y_star = bisect_crossing(
      [&](double y) { return big_f_at(model, means, best, y); }, 0.0, hi, 1.0, tol,
      "solve_w_star");

  std::vector<double> ratios(static_cast<size_t>(k), 1.0);
  for (int i = 0; i < k; ++i)
    if (i != best)
      ratios[static_cast<size_t>(i)] =
          l_inverse_at(model, mu_best, means[static_cast<size_t>(i)], y_star, 1e-13);
  double total = 0.0;
  for (double r : ratios) total += r;
  for (double& r : ratios) r /= total;
  return ratios;
}

WStarResult solve_w_star(const Instance& inst, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_w_star: tol must be positive");
  const int best = inst.best_arm();
  const double d_gap = inst.model().kl(inst.mean(best), inst.mean(inst.second_best_arm()));
  double hi = (1.0 - 1e-12) * d_gap;
  const double y_star = bisect_crossing(
      [&](double y) { return big_f_at(inst.model(), inst.means(), best, y); }, 0.0, hi,
      1.0, tol, "solve_w_star");
  std::vector<double> ratios(static_cast<size_t>(inst.num_arms()), 1.0);
  for (int i = 0; i < inst.num_arms(); ++i)
    if (i != best) ratios[static_cast<size_t>(i)] = l_inverse_at(inst.model(), inst.mean(best), inst.mean(i), y_star, 1e-13);
  return WStarResult{Weights(std::move(ratios)), y_star};
}

double t_star(const Instance& inst, double tol) {
  const WStarResult res = solve_w_star(inst, tol);
  return 1.0 / g_value(res.w, inst);
}

double t_beta(const Instance& inst, double beta, double tol) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("t_beta: beta must lie in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("t_beta: tol must be positive");
  const int best = inst.best_arm();
  const double mu_best = inst.mean(best);
  const double target = (1.0 - beta) / beta;
  const double d_gap = inst.model().kl(mu_best, inst.mean(inst.second_best_arm()));
  // sum_i l_i(c) increases from 0 and diverges as c approaches d(mu_1, mu_2).
  const auto allocation_sum = [&](double c) {
    double s = 0.0;
    for (int i = 0; i < inst.num_arms(); ++i)
      if (i != best) s += l_inverse_at(inst.model(), mu_best, inst.mean(i), c, 1e-13);
    return s;
  };
  const double c = bisect_crossing(allocation_sum, 0.0, (1.0 - 1e-12) * d_gap, target,
                                   tol, "t_beta");
  return 1.0 / (beta * c);
}

double solve_gamma(const Instance& inst, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_gamma: tol must be positive");
  const double mu1 = inst.mean(inst.best_arm());
  const double mu2 = inst.mean(inst.second_best_arm());
  // d(mu_1, mix) - d(mu_2, mix) increases in gamma from negative to positive.
  const auto balance = [&](double gamma) {
    const double m = (1.0 - gamma) * mu1 + gamma * mu2;
    return inst.model().kl(mu1, m) - inst.model().kl(mu2, m);
  };
  const double gamma =
      bisect_crossing(balance, 0.0, 1.0, 0.0, kInf, "solve_gamma");
  // Residual check in the scale of the divergences themselves.
  const double m = (1.0 - gamma) * mu1 + gamma * mu2;
  const double lhs = inst.model().kl(mu1, m);
  const double rhs = inst.model().kl(mu2, m);
  if (!(std::abs(lhs - rhs) <= tol * std::max(1.0, lhs))) {
    std::ostringstream os;
    os << "solve_gamma: balance residual " << std::abs(lhs - rhs);
    throw SolverError(os.str());
  }
  return gamma;
}

TLowerResult t_lower(const Instance& inst, double tol) {
  const int best = inst.best_arm();
  const double mu_best = inst.mean(best);
  const double gamma = solve_gamma(inst, tol);
  const double y_lower =
      k_at(inst.model(), mu_best, inst.mean(inst.second_best_arm()), gamma / (1.0 - gamma));
  // Allocation ratios z_i/(1-z_i) = l_i(ybar), with the best arm's ratio = 1
  // (z_1 = 1/2).
  std::vector<double> ratios(static_cast<size_t>(inst.num_arms()), 1.0);
  for (int i = 0; i < inst.num_arms(); ++i)
    if (i != best)
      ratios[static_cast<size_t>(i)] =
          l_inverse_at(inst.model(), mu_best, inst.mean(i), y_lower, 1e-13);
  Weights w(std::move(ratios));
  const double t = 1.0 / g_value(w, inst);
  return TLowerResult{t, std::move(w), gamma, y_lower};
}

double gaussian_t_lower_closed(const Instance& inst) {
  if (inst.model().family() != Family::Gaussian)
    throw std::invalid_argument("gaussian_t_lower_closed: Gaussian model required");
  const double sigma2 = inst.model().sigma2();
  const double mu1 = inst.mean(inst.best_arm());
  const double delta2 = mu1 - inst.mean(inst.second_best_arm());
  double total = 0.0;
  for (int i = 0; i < inst.num_arms(); ++i) {
    const double delta = i == inst.best_arm() ? delta2 : mu1 - inst.mean(i);
    total += 4.0 * sigma2 / (delta * delta + (delta * delta - delta2 * delta2));
  }
  return total;
}

double brute_force_t_star(const Instance& inst, int grid_resolution) {
  const int k = inst.num_arms();
  if (k > 4) throw std::invalid_argument("brute_force_t_star: K must be at most 4");
  if (grid_resolution < 50)
    throw std::invalid_argument("brute_force_t_star: resolution must be at least 50");
  const int r = grid_resolution;
  std::vector<double> w(static_cast<size_t>(k), 0.0);
  double best_g = 0.0;
  // Enumerate the lattice {(n_1,...,n_K)/r : sum n_i = r}.
  const auto visit = [&](auto&& self, int arm, int remaining) -> void {
    if (arm == k - 1) {
      w[static_cast<size_t>(arm)] = static_cast<double>(remaining) / r;
      best_g = std::max(best_g, g_at(inst.model(), inst.means(), inst.best_arm(), w));
      return;
    }
    for (int n = 0; n <= remaining; ++n) {
      w[static_cast<size_t>(arm)] = static_cast<double>(n) / r;
      self(self, arm + 1, remaining - n);
    }
  };
  visit(visit, 0, r);
  return 1.0 / best_g;
}

CharacteristicTimes characteristic_times(const Instance& inst, double tol) {
  const double gap =
      inst.mean(inst.best_arm()) - inst.mean(inst.second_best_arm());
  if (gap < 1e-9)
    throw std::invalid_argument(
        "characteristic_times: near-tied best arms (gap < 1e-9), the times diverge");
  WStarResult ws = solve_w_star(inst, tol);
  const double ts = 1.0 / g_value(ws.w, inst);
  const double th = t_beta(inst, 0.5, tol);
  TLowerResult tl = t_lower(inst, tol);
  return CharacteristicTimes{ts,   std::move(ws.w), ws.y_star, th,
                             tl.t, std::move(tl.w), tl.gamma,  tl.y_lower};
}

}  // namespace bai
