#include "bai/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p log(p/q) with the 0 log 0 = 0 convention.
double xlogx_ratio(double p, double q) {
  if (p == 0.0) return 0.0;
  return p * std::log(p / q);
}

[[noreturn]] void domain_error(const Model& m, double mu) {
  std::ostringstream os;
  os << "mean " << mu << " outside the domain of model " << m.name();
  throw std::invalid_argument(os.str());
}

}  // namespace

Model Model::bernoulli() { return Model(Family::Bernoulli, 0.0); }

Model Model::gaussian_known_var(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  return Model(Family::Gaussian, sigma2);
}

Model Model::poisson() { return Model(Family::Poisson, 0.0); }

Model Model::exponential() { return Model(Family::Exponential, 0.0); }

Model Model::pareto_known_scale(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  return Model(Family::Pareto, scale);
}

double Model::sigma2() const {
  if (family_ != Family::Gaussian)
    throw std::invalid_argument("sigma2 is defined for the Gaussian model only");
  return param_;
}

double Model::scale() const {
  if (family_ != Family::Pareto)
    throw std::invalid_argument("scale is defined for the Pareto model only");
  return param_;
}

bool Model::in_open_domain(double mu) const {
  if (!std::isfinite(mu)) return false;
  switch (family_) {
    case Family::Bernoulli: return mu > 0.0 && mu < 1.0;
    case Family::Gaussian: return true;
    case Family::Poisson: return mu > 0.0;
    case Family::Exponential: return mu > 0.0;
    case Family::Pareto: return mu > param_;
  }
  return false;
}

bool Model::in_closed_domain(double mu) const {
  if (!std::isfinite(mu)) return false;
  switch (family_) {
    case Family::Bernoulli: return mu >= 0.0 && mu <= 1.0;
    case Family::Gaussian: return true;
    case Family::Poisson: return mu >= 0.0;
    case Family::Exponential: return mu >= 0.0;
    case Family::Pareto: return mu >= param_;
  }
  return false;
}

double Model::kl(double mu, double mu_prime) const {
  if (!in_closed_domain(mu)) domain_error(*this, mu);
  if (!in_closed_domain(mu_prime)) domain_error(*this, mu_prime);
  if (mu == mu_prime) return 0.0;
  switch (family_) {
    case Family::Bernoulli:
      return xlogx_ratio(mu, mu_prime) + xlogx_ratio(1.0 - mu, 1.0 - mu_prime);
    case Family::Gaussian: {
      const double diff = mu - mu_prime;
      return diff * diff / (2.0 * param_);
    }
    case Family::Poisson:
      return xlogx_ratio(mu, mu_prime) + mu_prime - mu;
    case Family::Exponential: {
      if (mu == 0.0) return kInf;
      const double r = mu / mu_prime;
      return r - 1.0 - std::log(r);
    }
    case Family::Pareto: {
      // Shape map th = mu/(mu - scale); th -> inf as mu -> scale+.
      if (mu == param_ || mu_prime == param_) return kInf;
      const double th = mu / (mu - param_);
      const double th_p = mu_prime / (mu_prime - param_);
      return std::log(th / th_p) + th_p / th - 1.0;
    }
  }
  return 0.0;
}

double Model::sample(double mu, RandomStream& rng) const {
  if (!in_open_domain(mu)) domain_error(*this, mu);
  auto& eng = rng.engine();
  switch (family_) {
    case Family::Bernoulli:
      return std::bernoulli_distribution(mu)(eng) ? 1.0 : 0.0;
    case Family::Gaussian:
      return std::normal_distribution<double>(mu, std::sqrt(param_))(eng);
    case Family::Poisson:
      return static_cast<double>(std::poisson_distribution<int64_t>(mu)(eng));
    case Family::Exponential:
      return std::exponential_distribution<double>(1.0 / mu)(eng);
    case Family::Pareto: {
      // Inverse CDF: X = scale * U^{-1/th}, U uniform on (0,1].
      const double th = mu / (mu - param_);
      const double u = 1.0 - rng.uniform();  // uniform() is [0,1)
      return param_ * std::pow(u, -1.0 / th);
    }
  }
  return 0.0;
}

double Model::posterior_sample(const ArmObservations& obs, RandomStream& rng) const {
  if (obs.count < 2)
    throw std::invalid_argument("posterior_sample requires at least 2 observations");
  auto& eng = rng.engine();
  const double n = static_cast<double>(obs.count);
  switch (family_) {
    case Family::Bernoulli: {
      // Beta(S + 1/2, n - S + 1/2) via two gamma draws.
      const double a = obs.sum + 0.5;
      const double b = n - obs.sum + 0.5;
      const double x = std::gamma_distribution<double>(a, 1.0)(eng);
      const double y = std::gamma_distribution<double>(b, 1.0)(eng);
      return x / (x + y);
    }
    case Family::Gaussian:
      return std::normal_distribution<double>(obs.sum / n, std::sqrt(param_ / n))(eng);
    case Family::Poisson:
      // Gamma(S + 1/2, rate n); std::gamma_distribution takes the scale.
      return std::gamma_distribution<double>(obs.sum + 0.5, 1.0 / n)(eng);
    case Family::Exponential: {
      const double rate = std::gamma_distribution<double>(n, 1.0 / obs.sum)(eng);
      return 1.0 / rate;
    }
    case Family::Pareto: {
      const double rate = obs.sum_log - n * std::log(param_);
      const double th = std::gamma_distribution<double>(n, 1.0 / rate)(eng);
      if (th <= 1.0) return kInf;  // infinite-mean draw, argmax sentinel
      return param_ * th / (th - 1.0);
    }
  }
  return 0.0;
}

std::string Model::name() const {
  switch (family_) {
    case Family::Bernoulli: return "bernoulli";
    case Family::Gaussian: return "gaussian";
    case Family::Poisson: return "poisson";
    case Family::Exponential: return "exponential";
    case Family::Pareto: return "pareto";
  }
  return "?";
}

Model Model::from_name(const std::string& name, double sigma2, double scale) {
  if (name == "bernoulli") return bernoulli();
  if (name == "gaussian") return gaussian_known_var(sigma2);
  if (name == "poisson") return poisson();
  if (name == "exponential") return exponential();
  if (name == "pareto") return pareto_known_scale(scale);
  throw std::invalid_argument("unknown model '" + name + "'");
}

double weighted_mean(double mu_a, double mu_b, double w_a, double w_b) {
  if (w_a < 0.0 || w_b < 0.0)
    throw std::invalid_argument("weighted_mean: negative weight");
  const double total = w_a + w_b;
  if (total <= 0.0)
    throw std::invalid_argument("weighted_mean: weights sum to zero");
  return (w_a * mu_a + w_b * mu_b) / total;
}

Instance::Instance(Model model, std::vector<double> means)
    : model_(model), means_(std::move(means)) {
  if (means_.size() < 2)
    throw std::invalid_argument("an instance needs at least two arms");
  for (double mu : means_) {
    if (!model_.in_open_domain(mu)) {
      std::ostringstream os;
      os << "mean " << mu << " not strictly inside the domain of " << model_.name();
      throw std::invalid_argument(os.str());
    }
  }
  best_ = 0;
  for (int i = 1; i < num_arms(); ++i)
    if (means_[static_cast<size_t>(i)] > means_[static_cast<size_t>(best_)]) best_ = i;
  for (int i = 0; i < num_arms(); ++i)
    if (i != best_ && means_[static_cast<size_t>(i)] == means_[static_cast<size_t>(best_)])
      throw std::invalid_argument("the best arm must be unique (tied maxima)");
  second_ = best_ == 0 ? 1 : 0;
  for (int i = 0; i < num_arms(); ++i)
    if (i != best_ && means_[static_cast<size_t>(i)] > means_[static_cast<size_t>(second_)])
      second_ = i;
}

}  // namespace bai
