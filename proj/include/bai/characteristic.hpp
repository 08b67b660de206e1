#pragma once

#include <span>
#include <vector>

#include "bai/model.hpp"

namespace bai {

// Point on the probability simplex. Entries must be nonnegative with a
// positive sum; the constructor renormalizes so the sum is 1 (within float
// rounding of the division).
class Weights {
 public:
  explicit Weights(std::vector<double> w);

  std::span<const double> values() const { return w_; }
  double operator[](int i) const { return w_[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(w_.size()); }

 private:
  std::vector<double> w_;
};

// Transportation cost of confusing a pair of arms:
//   w_a d(mu_a, m) + w_b d(mu_b, m),  m the (w_a, w_b)-weighted mean.
// Zero when w_a + w_b = 0.
double pair_cost(const Model& model, double mu_a, double mu_b, double w_a, double w_b);

// f_i(w; mu) for a suboptimal arm i against the best arm.
double f_value(int i, const Weights& w, const Instance& inst, int best);

// g(w; mu) = min_{i != best} f_i(w; mu).
double g_value(const Weights& w, const Instance& inst);

// The explicit subgradient of g at interior w (uniform weights over the
// challenger set J = {i != best : f_i <= min f + tie_tol}, r = 0):
//   v_best = (1/|J|) sum_{j in J} d(mu_best, m_{best,j}),
//   v_j    = (1/|J|) d(mu_j, m_{best,j})   for j in J,   v_i = 0 otherwise.
std::vector<double> subgradient(const Weights& w, const Instance& inst,
                                double tie_tol = 0.0);

// k_i(x) = d(mu_1, m) + x d(mu_i, m), m = (mu_1 + x mu_i)/(1 + x); k_i(0) = 0.
double k_value(int i, double x, const Instance& inst);

// h_i(z) = (1-z) d(mu_1, m_z) + z d(mu_i, m_z) on [0,1]; h_i = (1-z) k_i(z/(1-z)).
double h_value(int i, double z, const Instance& inst);

// Inverse of k_i by bisection on a geometrically grown bracket:
// returns x with |k_i(x) - y| <= tol * max(1, y). Requires 0 <= y < d(mu_1, mu_i).
double l_inverse(int i, double y, const Instance& inst, double tol = 1e-12);

struct WStarResult {
  Weights w;
  double y_star;
};

// Optimal allocation via the F_mu characterization: y* solves F_mu(y) = 1 by
// bisection, then w*_i = l_i(y*) / sum_a l_a(y*) with l_best = 1.
WStarResult solve_w_star(const Instance& inst, double tol = 1e-10);

// T*(mu) = 1 / g(w*; mu).
double t_star(const Instance& inst, double tol = 1e-10);

// T^beta(mu): the best arm's allocation is pinned to beta and the suboptimal
// arms are equalized: find c with sum_{i != best} l_i(c) = (1-beta)/beta,
// then T^beta = 1/(beta c).
double t_beta(const Instance& inst, double beta, double tol = 1e-10);

// gamma in (0,1) balancing d(mu_1, m_g) = d(mu_2, m_g) at the gamma-weighted
// mean m_g of the best and second-best arms.
double solve_gamma(const Instance& inst, double tol = 1e-10);

struct TLowerResult {
  double t;
  Weights w;
  double gamma;
  double y_lower;
};

// underline-T(mu): gamma from the two-arm balance, ybar = k_2(gamma/(1-gamma)),
// allocation ratios l_i(ybar) normalized with the best arm's ratio = 1.
TLowerResult t_lower(const Instance& inst, double tol = 1e-10);

// Closed form for Gaussian instances:
//   underline-T = sum_i 4 sigma^2 / (Delta_i^2 + (Delta_i^2 - Delta_2^2)),
// with Delta_1 := Delta_2.
double gaussian_t_lower_closed(const Instance& inst);

// Simplex-lattice search oracle; K <= 4, resolution >= 50. Upper-bounds T*
// up to grid granularity.
double brute_force_t_star(const Instance& inst, int grid_resolution);

struct CharacteristicTimes {
  double t_star;
  Weights w_star;
  double y_star;
  double t_half;  // T^beta at beta = 1/2
  double t_lower;
  Weights w_lower;
  double gamma;
  double y_lower;
};

// All characteristic quantities for one instance. Rejects near-degenerate
// instances with mu_1 - mu_2 < 1e-9 (the times diverge).
CharacteristicTimes characteristic_times(const Instance& inst, double tol = 1e-10);

// Span-based versions that accept raw (possibly boundary-valued) empirical
// means with an explicit best arm, for use on mu-hat inside policies and the
// stopping rule. The Instance overloads above validate and forward here.
double f_at(const Model& model, std::span<const double> means, int best, int i,
            std::span<const double> w);
double g_at(const Model& model, std::span<const double> means, int best,
            std::span<const double> w);
std::vector<double> subgradient_at(const Model& model, std::span<const double> means,
                                   int best, std::span<const double> w, double tie_tol);
std::vector<double> w_star_at(const Model& model, std::span<const double> means,
                              int best, double tol);

}  // namespace bai
