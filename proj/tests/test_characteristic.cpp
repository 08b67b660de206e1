#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bai/characteristic.hpp"
#include "bai/errors.hpp"
#include "bai/model.hpp"
#include "oracles.hpp"

using bai::Instance;
using bai::Model;
using bai::Weights;

namespace {

const Instance mu5b() { return Instance(Model::bernoulli(), {0.3, 0.21, 0.2, 0.19, 0.18}); }
const Instance mu4g() {
  return Instance(Model::gaussian_known_var(1.0), {1.0, 0.85, 0.8, 0.7});
}
const Instance gauss2(double a = 1.0, double b = 0.0) {
  return Instance(Model::gaussian_known_var(1.0), {a, b});
}

// Oracle values computed independently (simplex characterization solved with
// an external high-precision root finder).
constexpr double kTStarMu5B = 326.6421124102884;
constexpr double kGAtWStarMu5B = 0.003061454607371387;
constexpr double kTLowerMu5B = 332.9360593025063;
constexpr double kGammaMu5B = 0.5097637251632174;
constexpr double kTHalfMu5B = 362.5706022456529;
constexpr double kTStarMu4G = 449.8696301874544;
constexpr double kTLowerMu4G = 450.5175983436852;
constexpr double kTHalfMu4G = 464.5598179016601;

std::mt19937_64 test_eng(0xabcdef);

std::vector<double> random_interior_weights(int k, std::mt19937_64& eng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(static_cast<size_t>(k));
  double s = 0.0;
  for (double& x : w) s += (x = 0.05 + e(eng));
  for (double& x : w) x /= s;
  return w;
}

}  // namespace

TEST_CASE("weights renormalize and validate") {
  const Weights w({2.0, 2.0});
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(Weights({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(Weights({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Weights({}), std::invalid_argument);
}

TEST_CASE("f_value examples") {
  const Instance g2 = gauss2();
  CHECK(bai::f_value(1, Weights({0.5, 0.5}), g2, 0) == doctest::Approx(0.125));
  CHECK(bai::f_value(1, Weights({0.25, 0.75}), g2, 0) == doctest::Approx(0.09375));
  // zero allocation on the pair gives zero cost
  const Instance g3(Model::gaussian_known_var(1.0), {1.0, 0.0, -1.0});
  CHECK(bai::f_value(1, Weights({0.0, 0.0, 1.0}), g3, 0) == 0.0);
  CHECK_THROWS_AS(bai::f_value(0, Weights({0.5, 0.5}), g2, 0), std::invalid_argument);
}

TEST_CASE("g_value examples") {
  const Instance g2 = gauss2();
  CHECK(bai::g_value(Weights({0.5, 0.5}), g2) ==
        doctest::Approx(bai::f_value(1, Weights({0.5, 0.5}), g2, 0)));
  const Instance b = mu5b();
  CHECK(bai::g_value(Weights({0.0, 0.25, 0.25, 0.25, 0.25}), b) == 0.0);
  const bai::WStarResult ws = bai::solve_w_star(b);
  CHECK(bai::g_value(ws.w, b) == doctest::Approx(kGAtWStarMu5B).epsilon(1e-9));
}

TEST_CASE("subgradient examples and structure") {
  const Instance g2 = gauss2();
  const std::vector<double> v = bai::subgradient(Weights({0.25, 0.75}), g2);
  CHECK(v[0] == doctest::Approx(0.28125));
  CHECK(v[1] == doctest::Approx(0.03125));
  const std::vector<double> sym = bai::subgradient(Weights({0.5, 0.5}), g2);
  CHECK(sym[0] == doctest::Approx(0.125));
  CHECK(sym[1] == doctest::Approx(0.125));

  // strict unique challenger: exactly two nonzero entries
  const Instance b = mu5b();
  const std::vector<double> vb =
      bai::subgradient(Weights({0.3, 0.3, 0.2, 0.1, 0.1}), b);
  int nonzero = 0;
  for (double x : vb) nonzero += x != 0.0;
  CHECK(nonzero == 2);
  CHECK(vb[0] > 0.0);

  CHECK_THROWS_AS(bai::subgradient(Weights({1.0, 0.0}), g2), std::invalid_argument);
}

TEST_CASE("lemma 1: subgradient upper-bounds g everywhere") {
  for (const Instance& inst : {mu5b(), mu4g()}) {
    for (int n = 0; n < 300; ++n) {
      const Weights w(random_interior_weights(inst.num_arms(), test_eng));
      const Weights wp(random_interior_weights(inst.num_arms(), test_eng));
      const std::vector<double> v = bai::subgradient(w, inst);
      double dot = 0.0;
      for (int i = 0; i < inst.num_arms(); ++i) dot += v[static_cast<size_t>(i)] * (wp[i] - w[i]);
      CHECK(bai::g_value(wp, inst) <= bai::g_value(w, inst) + dot + 1e-10);
    }
  }
}

TEST_CASE("g is concave along random chords") {
  const Instance b = mu5b();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n = 0; n < 300; ++n) {
    const std::vector<double> wa = random_interior_weights(5, test_eng);
    const std::vector<double> wb = random_interior_weights(5, test_eng);
    const double lam = unif(test_eng);
    std::vector<double> mid(5);
    for (int i = 0; i < 5; ++i)
      mid[static_cast<size_t>(i)] = lam * wa[static_cast<size_t>(i)] + (1 - lam) * wb[static_cast<size_t>(i)];
    CHECK(bai::g_value(Weights(mid), b) >=
          lam * bai::g_value(Weights(wa), b) + (1 - lam) * bai::g_value(Weights(wb), b) - 1e-12);
  }
}

TEST_CASE("k and h: identities and gaussian closed forms") {
  const Instance g2(Model::gaussian_known_var(1.0), {0.5, 0.2});  // gap 0.3
  CHECK(bai::k_value(1, 0.0, g2) == 0.0);
  CHECK(bai::k_value(1, 1.0, g2) == doctest::Approx(0.0225));  // x/(1+x) D^2/2 at x=1
  CHECK(bai::h_value(1, 0.5, g2) == doctest::Approx(0.01125));
  CHECK(bai::h_value(1, 0.0, g2) == 0.0);
  CHECK(bai::h_value(1, 1.0, g2) == 0.0);
  // h(z) = (1-z) k(z/(1-z))
  for (double z : {0.1, 0.35, 0.6, 0.85}) {
    CHECK(bai::h_value(1, z, g2) ==
          doctest::Approx((1 - z) * bai::k_value(1, z / (1 - z), g2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bai::k_value(0, 1.0, g2), std::invalid_argument);
  CHECK_THROWS_AS(bai::h_value(1, 1.5, g2), std::invalid_argument);
}

TEST_CASE("k is increasing and ordered by the challenged arm's mean") {
  for (const Instance& inst : {mu5b(), mu4g()}) {
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
      double prev = -1.0;
      // arms sorted descending by mean in these instances: k grows as the
      // mean drops
      for (int i = 1; i < inst.num_arms(); ++i) {
        const double ki = bai::k_value(i, x, inst);
        CHECK(ki >= prev);
        prev = ki;
      }
      for (int i = 1; i < inst.num_arms(); ++i)
        CHECK(bai::k_value(i, x + 0.05, inst) > bai::k_value(i, x, inst));
    }
  }
}

TEST_CASE("l_inverse: examples, round-trip, monotonicity") {
  const Instance g2(Model::gaussian_known_var(1.0), {0.5, 0.2});
  CHECK(bai::l_inverse(1, 0.0, g2) == 0.0);
  // gaussian closed form: l(y) = y / (D^2/2 - y)
  CHECK(bai::l_inverse(1, 0.0225, g2) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(bai::l_inverse(1, 0.045, g2), std::invalid_argument);
  CHECK_THROWS_AS(bai::l_inverse(1, -0.1, g2), std::invalid_argument);

  const Instance b = mu5b();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double prev_x = -1.0;
  for (int n = 0; n < 100; ++n) {
    const double y_sup = b.model().kl(0.3, 0.21);
    const double y = unif(test_eng) * y_sup * (1 - 1e-6);
    const double x = bai::l_inverse(1, y, b);
    CHECK(bai::k_value(1, x, b) == doctest::Approx(y).epsilon(1e-9).scale(1.0));
    (void)prev_x;
  }
  for (double y1 = 0.001; y1 < 0.02; y1 += 0.003) {
    CHECK(bai::l_inverse(1, y1 + 0.001, b) > bai::l_inverse(1, y1, b));
  }
}

TEST_CASE("solve_w_star reproduces the published allocations") {
  const bai::WStarResult wb = bai::solve_w_star(mu5b());
  const std::vector<double> expect_b{0.33588511314432634, 0.2514993862413075,
                                     0.1766322921914709, 0.13241666902851007,
                                     0.10356653939438527};
  for (int i = 0; i < 5; ++i)
    CHECK(wb.w[i] == doctest::Approx(expect_b[static_cast<size_t>(i)]).epsilon(1e-7));

  const bai::WStarResult wg = bai::solve_w_star(mu4g());
  const std::vector<double> expect_g{0.4124783785697881, 0.3792671574574465,
                                     0.1521369975524519, 0.05611746642031358};
  for (int i = 0; i < 4; ++i)
    CHECK(wg.w[i] == doctest::Approx(expect_g[static_cast<size_t>(i)]).epsilon(1e-7));

  // equalization self-check: k_i(w_i / w_1) = y* for every suboptimal arm
  for (int i = 1; i < 5; ++i)
    CHECK(bai::k_value(i, wb.w[i] / wb.w[0], mu5b()) ==
          doctest::Approx(wb.y_star).epsilon(1e-8));

  // two-arm symmetric gaussian
  const bai::WStarResult w2 = bai::solve_w_star(gauss2());
  CHECK(w2.w[0] == doctest::Approx(0.5).epsilon(1e-9));

  // unsorted input: best arm not first
  const Instance shuffled(Model::bernoulli(), {0.19, 0.3, 0.18, 0.21, 0.2});
  const bai::WStarResult ws = bai::solve_w_star(shuffled);
  CHECK(ws.w[1] == doctest::Approx(expect_b[0]).epsilon(1e-7));
  CHECK(ws.w[3] == doctest::Approx(expect_b[1]).epsilon(1e-7));
}

TEST_CASE("t_star values and oracle agreement") {
  CHECK(bai::t_star(mu5b()) == doctest::Approx(kTStarMu5B).epsilon(1e-9));
  CHECK(bai::t_star(mu4g()) == doctest::Approx(kTStarMu4G).epsilon(1e-9));
  CHECK(bai::t_star(gauss2()) == doctest::Approx(8.0).epsilon(1e-9));
  // grid oracle, K = 3
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n = 0; n < 4; ++n) {
    std::vector<double> means{0.4 + 0.3 * unif(test_eng)};
    means.push_back(means[0] - 0.05 - 0.2 * unif(test_eng));
    means.push_back(means[1] - 0.02 - 0.1 * unif(test_eng));
    const Instance inst(Model::bernoulli(), std::move(means));
    CHECK(bai::t_star(inst) ==
          doctest::Approx(bai::brute_force_t_star(inst, 400)).epsilon(0.02));
  }
}

TEST_CASE("t_beta: optimum at beta = w*_1, dominance, and slice-grid agreement") {
  const Instance b = mu5b();
  const bai::WStarResult ws = bai::solve_w_star(b);
  CHECK(bai::t_beta(b, ws.w[0]) == doctest::Approx(kTStarMu5B).epsilon(1e-8));
  CHECK(bai::t_beta(b, 0.5) == doctest::Approx(kTHalfMu5B).epsilon(1e-9));
  CHECK(bai::t_beta(mu4g(), 0.5) == doctest::Approx(kTHalfMu4G).epsilon(1e-9));
  CHECK(bai::t_beta(gauss2(), 0.5) == doctest::Approx(8.0).epsilon(1e-9));
  CHECK_THROWS_AS(bai::t_beta(b, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bai::t_beta(b, 1.0), std::invalid_argument);

  // canonical models: T* <= T^{1/2} <= 2 T*
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n = 0; n < 12; ++n) {
    std::vector<double> means{0.5 + 0.3 * unif(test_eng)};
    const int k = 2 + static_cast<int>(test_eng() % 4);
    for (int i = 1; i < k; ++i) means.push_back(means[0] - 0.04 - 0.3 * unif(test_eng));
    const Instance inst(Model::bernoulli(), std::move(means));
    const double ts = bai::t_star(inst);
    const double th = bai::t_beta(inst, 0.5);
    CHECK(th >= ts * (1 - 1e-9));
    CHECK(th <= 2 * ts * (1 + 1e-9));
  }

  // constrained grid search cross-check on K = 3
  const Instance b3(Model::bernoulli(), {0.45, 0.3, 0.2});
  const double equalized = bai::t_beta(b3, 0.5);
  const double grid = 1.0 / oracle::slice_sup_g(b3, 0.5, 4000);
  CHECK(equalized == doctest::Approx(grid).epsilon(1e-5));
  CHECK(equalized <= grid * (1 + 1e-9));  // grid under-estimates the sup
}

TEST_CASE("solve_gamma: balance point") {
  CHECK(bai::solve_gamma(mu4g()) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bai::solve_gamma(gauss2(5.0, -3.0)) == doctest::Approx(0.5).epsilon(1e-12));
  const Instance b2(Model::bernoulli(), {0.3, 0.21});
  const double gamma = bai::solve_gamma(b2);
  CHECK(gamma == doctest::Approx(0.5097637251632174).epsilon(1e-10));
  const double m = (1 - gamma) * 0.3 + gamma * 0.21;
  CHECK(std::abs(b2.model().kl(0.3, m) - b2.model().kl(0.21, m)) <=
        1e-9 * std::max(1.0, b2.model().kl(0.3, m)));
}

TEST_CASE("t_lower: values, two-arm equality, gaussian bounds") {
  const bai::TLowerResult tb = bai::t_lower(mu5b());
  CHECK(tb.t == doctest::Approx(kTLowerMu5B).epsilon(1e-9));
  CHECK(tb.gamma == doctest::Approx(kGammaMu5B).epsilon(1e-10));
  CHECK(tb.w[0] == doctest::Approx(0.2750530271341206).epsilon(1e-7));
  CHECK(tb.w[1] == doctest::Approx(0.2860091407474694).epsilon(1e-7));

  const bai::TLowerResult tg = bai::t_lower(mu4g());
  CHECK(tg.t == doctest::Approx(kTLowerMu4G).epsilon(1e-9));
  CHECK(tg.t == doctest::Approx(bai::gaussian_t_lower_closed(mu4g())).epsilon(1e-9));

  // K = 2: underline-T = T* for every model
  const std::vector<Instance> two_arm = {
      Instance(Model::bernoulli(), {0.3, 0.21}),
      Instance(Model::gaussian_known_var(1.0), {1.0, 0.4}),
      Instance(Model::poisson(), {1.5, 0.8}),
      Instance(Model::exponential(), {0.5, 0.3}),
      Instance(Model::pareto_known_scale(1.0), {5.0, 2.0}),
  };
  for (const Instance& inst : two_arm)
    CHECK(std::abs(bai::t_lower(inst).t - bai::t_star(inst)) / bai::t_star(inst) <=
          1e-6);

  // ordering on the paper instances
  CHECK(bai::t_star(mu5b()) <= kTLowerMu5B);
  CHECK(kTLowerMu5B <= 2 * bai::t_star(mu5b()));
}

TEST_CASE("gaussian_t_lower_closed") {
  CHECK(bai::gaussian_t_lower_closed(mu4g()) ==
        doctest::Approx(450.5175983436852).epsilon(1e-12));
  CHECK(bai::gaussian_t_lower_closed(gauss2()) == doctest::Approx(8.0));
  CHECK_THROWS_AS(bai::gaussian_t_lower_closed(mu5b()), std::invalid_argument);

  // generic solver agreement on random gaussian instances
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    const int k = 2 + static_cast<int>(test_eng() % 4);
    std::vector<double> means{unif(test_eng)};
    for (int i = 1; i < k; ++i) means.push_back(means[0] - 0.1 - unif(test_eng));
    const Instance inst(Model::gaussian_known_var(0.5 + unif(test_eng)), std::move(means));
    const double generic = bai::t_lower(inst).t;
    const double closed = bai::gaussian_t_lower_closed(inst);
    CHECK(std::abs(generic - closed) / closed <= 1e-6);
    const double ts = bai::t_star(inst);
    CHECK(generic >= ts * (1 - 1e-9));
    CHECK(generic <= 2 * ts * (1 + 1e-9));
  }
}

TEST_CASE("brute_force_t_star: guards, known value, refinement") {
  const Instance g2 = gauss2();
  CHECK(bai::brute_force_t_star(g2, 400) == doctest::Approx(8.0).epsilon(0.0125));
  CHECK_THROWS_AS(bai::brute_force_t_star(g2, 30), std::invalid_argument);
  const Instance big(Model::bernoulli(), {0.6, 0.5, 0.4, 0.3, 0.2});
  CHECK_THROWS_AS(bai::brute_force_t_star(big, 100), std::invalid_argument);

  const Instance b3(Model::bernoulli(), {0.45, 0.3, 0.2});
  const double coarse = bai::brute_force_t_star(b3, 100);
  const double fine = bai::brute_force_t_star(b3, 400);
  CHECK(fine <= coarse * (1 + 1e-12));  // the res-100 lattice nests in res-400
  CHECK(coarse == doctest::Approx(fine).epsilon(0.02));
}

TEST_CASE("characteristic_times: invariants and degenerate rejection") {
  const bai::CharacteristicTimes ct = bai::characteristic_times(mu5b());
  CHECK(ct.t_star <= ct.t_lower * (1 + 1e-12));
  CHECK(ct.t_star <= ct.t_half * (1 + 1e-12));
  CHECK(ct.gamma > 0.0);
  CHECK(ct.gamma < 1.0);
  CHECK(ct.t_half == doctest::Approx(kTHalfMu5B).epsilon(1e-9));

  CHECK_THROWS_AS(
      bai::characteristic_times(Instance(Model::bernoulli(), {0.5, 0.5 - 1e-12})),
      std::invalid_argument);
}
