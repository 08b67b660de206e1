#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bai/rng.hpp"

namespace bai {

enum class Family { Bernoulli, Gaussian, Poisson, Exponential, Pareto };

// Sufficient statistics of one arm's observations. sum_log is accumulated
// only for Pareto rewards (its posterior lives on the log scale).
struct ArmObservations {
  int64_t count = 0;
  double sum = 0.0;
  double sum_log = 0.0;
};

/*
 * Single-parameter exponential-family reward model on the mean
 * parameterization. All public entry points take means; natural parameters
 * stay internal to the closed forms below.
 *
 * Divergences d(mu, mu') = KL(P_mu, P_mu'):
 *   Bernoulli     mu log(mu/mu') + (1-mu) log((1-mu)/(1-mu'))
 *   Gaussian      (mu - mu')^2 / (2 sigma^2)                (known variance)
 *   Poisson       mu log(mu/mu') + mu' - mu
 *   Exponential   mu/mu' - 1 - log(mu/mu')
 *   Pareto        log(th/th') + th'/th - 1,  th = mu/(mu - scale)  (known scale)
 *
 * Boundary conventions (needed so GLR statistics stay evaluable at extreme
 * empirical means): 0 log 0 = 0, hence Bernoulli d(0,y) = -log(1-y),
 * d(1,y) = -log(y), Poisson d(0,y) = y. Values may be +infinity at the
 * closure (e.g. Bernoulli d(1,0)); means outside the closed domain are
 * rejected.
 *
 * Jeffreys posteriors after n observations (sum S, log-sum L), standard
 * conjugate derivations:
 *   Bernoulli     prior Beta(1/2,1/2); posterior Beta(S + 1/2, n - S + 1/2);
 *                 the Beta draw is the mean itself.
 *   Gaussian      location parameter, Jeffreys prior flat; posterior
 *                 N(S/n, sigma^2/n).
 *   Poisson       prior pi(la) ~ la^{-1/2}; posterior Gamma(S + 1/2, rate n);
 *                 the rate draw is the mean.
 *   Exponential   prior on rate pi(la) ~ 1/la; posterior la ~ Gamma(n, rate S);
 *                 mean = 1/la.
 *   Pareto        prior on shape pi(th) ~ 1/th (Fisher info 1/th^2); posterior
 *                 th ~ Gamma(n, rate L - n log(scale)); mean =
 *                 scale*th/(th-1), or +infinity when the drawn shape th <= 1.
 *                 The +infinity sentinel wins argmax comparisons and never
 *                 enters KL evaluations.
 */
class Model {
 public:
  static Model bernoulli();
  static Model gaussian_known_var(double sigma2);
  static Model poisson();
  static Model exponential();
  static Model pareto_known_scale(double scale);

  Family family() const { return family_; }
  double sigma2() const;  // Gaussian only
  double scale() const;   // Pareto only

  // Open interval of valid instance means; the closure additionally admits
  // the boundary values empirical means can reach.
  bool in_open_domain(double mu) const;
  bool in_closed_domain(double mu) const;

  // d(mu, mu') >= 0, zero iff equal. Accepts the closed domain under the
  // conventions above; throws std::invalid_argument outside it.
  double kl(double mu, double mu_prime) const;

  // One reward draw with mean mu (mu strictly inside the domain).
  double sample(double mu, RandomStream& rng) const;

  // Jeffreys-posterior draw of the mean; requires obs.count >= 2.
  double posterior_sample(const ArmObservations& obs, RandomStream& rng) const;

  std::string name() const;
  static Model from_name(const std::string& name, double sigma2, double scale);

  bool operator==(const Model& other) const {
    return family_ == other.family_ && param_ == other.param_;
  }

 private:
  Model(Family family, double param) : family_(family), param_(param) {}

  Family family_;
  double param_;  // sigma2 (Gaussian) or scale (Pareto), unused otherwise
};

// (w_a*mu_a + w_b*mu_b) / (w_a + w_b); requires w_a + w_b > 0, w_a, w_b >= 0.
double weighted_mean(double mu_a, double mu_b, double w_a, double w_b);

// A bandit problem: a model plus the vector of true means. Construction
// requires K >= 2, every mean strictly inside the model's mean domain, and a
// unique maximizer (ties for the best arm are rejected). Input need not be
// sorted; the best arm is computed.
class Instance {
 public:
  Instance(Model model, std::vector<double> means);

  const Model& model() const { return model_; }
  std::span<const double> means() const { return means_; }
  double mean(int i) const { return means_[static_cast<size_t>(i)]; }
  int num_arms() const { return static_cast<int>(means_.size()); }
  int best_arm() const { return best_; }
  // Highest mean among i != best_arm(); lowest index on ties.
  int second_best_arm() const { return second_; }

 private:
  Model model_;
  std::vector<double> means_;
  int best_ = 0;
  int second_ = 0;
};

}  // namespace bai
