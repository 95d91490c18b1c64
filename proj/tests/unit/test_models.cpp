#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "common.hpp"
#include "tpf/filters/bootstrap.hpp"
#include "tpf/harness/stats.hpp"
#include "tpf/models/finite_hmm.hpp"
#include "tpf/models/linear_gaussian.hpp"
#include "tpf/models/simulate.hpp"
#include "tpf/models/stochastic_volatility.hpp"

namespace tpf {
namespace {

using harness::mean_se;

// Brute-force joint density of Y_{0:n-1} and the unnormalized law of X_n,
// summing over every hidden path.
struct Enumerated {
  double Z = 0.0;
  std::vector<double> pi_n;
};

Enumerated enumerate_paths(const FiniteHmmParams& p, const std::vector<int>& ys, Time n) {
  const std::size_t k = p.num_states();
  Enumerated out;
  out.pi_n.assign(k, 0.0);
  std::vector<std::size_t> xs(static_cast<std::size_t>(n), 0);
  const std::function<void(Time, double)> rec = [&](Time t, double weight) {
    if (t == n) {
      out.Z += weight;
      for (std::size_t z = 0; z < k; ++z)
        out.pi_n[z] += n == 0 ? p.mu0[z] * weight
                              : weight * p.trans(static_cast<Eigen::Index>(xs.back()),
                                                 static_cast<Eigen::Index>(z));
      return;
    }
    for (std::size_t x = 0; x < k; ++x) {
      const auto xi = static_cast<Eigen::Index>(x);
      double step = t == 0 ? p.mu0[x]
                           : p.trans(static_cast<Eigen::Index>(xs[static_cast<std::size_t>(t - 1)]), xi);
      step *= p.emit(xi, ys[static_cast<std::size_t>(t)]);
      xs[static_cast<std::size_t>(t)] = x;
      rec(t + 1, weight * step);
    }
  };
  rec(0, 1.0);
  for (double& v : out.pi_n) v /= out.Z;
  return out;
}

TEST(Simulate, DegenerateArIsIid) {
  const LinearGaussianModel m(LinearGaussianParams::stationary(0.0, 1.0, 1.0));
  const auto path = simulate(m, 100000, 17);
  const auto ms = mean_se(path.hidden);
  EXPECT_NEAR(ms.mean, 0.0, 4.0 * ms.se);
  const double n = static_cast<double>(path.hidden.size());
  // var of the sample variance of N(0, 1) is 2 / n
  EXPECT_NEAR(ms.sd * ms.sd, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Simulate, PermutationChainFollowsItsOrbit) {
  FiniteHmmParams p;
  p.mu0 = {1.0, 0.0, 0.0};
  p.trans.resize(3, 3);
  p.trans << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  p.emit = Eigen::MatrixXd::Constant(3, 2, 0.5);
  const auto path = simulate(FiniteHmm(p), 30, 5);
  for (std::size_t t = 0; t < path.hidden.size(); ++t) EXPECT_EQ(path.hidden[t], t % 3);
}

TEST(Simulate, LinearGaussianLagOneAutocovariance) {
  const double a = 0.9;
  const LinearGaussianModel m(LinearGaussianParams::stationary(a, 1.0, 1.0));
  // Independent stationary paths; the mean is 0, so E[Y_t Y_{t+1}] is the
  // autocovariance and the per-path averages are unbiased for it.
  std::vector<double> per_path;
  for (std::uint64_t s = 0; s < 400; ++s) {
    const auto ys = simulate(m, 500, 1000 + s).window.values();
    double acc = 0.0;
    for (std::size_t t = 0; t + 1 < ys.size(); ++t) acc += ys[t] * ys[t + 1];
    per_path.push_back(acc / static_cast<double>(ys.size() - 1));
  }
  const auto ms = mean_se(per_path);
  EXPECT_NEAR(ms.mean, a * 1.0 / (1.0 - a * a), 4.0 * ms.se);
}

TEST(Simulate, DeterministicAndPrefixStable) {
  const FiniteHmm m(test::three_state_params());
  const auto a = simulate(m, 50, 99);
  const auto b = simulate(m, 80, 99);
  EXPECT_EQ(simulate(m, 50, 99).window, a.window);
  for (Time t = 0; t < 50; ++t) EXPECT_EQ(a.window.at(t), b.window.at(t));
  EXPECT_THROW(simulate(m, 0, 1), std::invalid_argument);
  std::ostringstream os;
  write_path_csv(os, a);
  EXPECT_EQ(os.str().substr(0, 6), "t,x,y\n");
}

TEST(Kalman, ZeroStepsHasUnitLikelihood) {
  const ObservationWindow<double> w({0.3});
  const auto k = kalman_run(LinearGaussianParams::stationary(0.9, 1.0, 1.0), w, 0);
  EXPECT_EQ(k.log_Z_n(), 0.0);
}

TEST(Kalman, OneStepHandEvaluation) {
  const double y0 = 1.7;
  const ObservationWindow<double> w({y0});
  const auto k = kalman_run(LinearGaussianParams::stationary(0.9, 1.0, 1.0), w, 1);
  const double v0 = 1.0 / (1.0 - 0.81);
  const double s = v0 + 1.0;
  EXPECT_NEAR(k.log_Z_n(), -0.5 * std::log(2.0 * M_PI * s) - y0 * y0 / (2.0 * s), 1e-14);
  // predict-update by hand
  const double gain = v0 / s;
  EXPECT_NEAR(k.pred_mean[1], 0.9 * gain * y0, 1e-14);
  EXPECT_NEAR(k.pred_var[1], 0.81 * (1.0 - gain) * v0 + 1.0, 1e-14);
}

TEST(Kalman, BootstrapReplicateMeanMatches) {
  const auto params = LinearGaussianParams::stationary(0.9, 1.0, 1.0);
  const LinearGaussianModel m(params);
  const auto w = simulate(m, 10, 3).window;
  const Time n = 10;
  const double log_z = kalman_run(params, w, n).log_Z_n();
  std::vector<double> ratio;
  for (std::uint64_t r = 0; r < 100; ++r) {
    RunOptions<double> opt;
    opt.N = 10000;
    opt.n = n;
    opt.seed = 8;
    opt.replicate = r;
    ratio.push_back(std::exp(bootstrap_run(m, w, opt).trace.log_Z.back() - log_z));
  }
  const auto ms = mean_se(ratio);
  EXPECT_NEAR(ms.mean, 1.0, 4.0 * ms.se);
  EXPECT_LT(ms.se, 0.01);
}

TEST(Kalman, WindowPure) {
  const auto params = LinearGaussianParams::stationary(0.9, 1.0, 1.0);
  const auto w = simulate(LinearGaussianModel(params), 20, 1).window;
  const auto a = kalman_run(params, w, 20);
  const auto b = kalman_run(params, w, 20);
  EXPECT_EQ(a.log_Z, b.log_Z);
  EXPECT_EQ(a.pred_mean, b.pred_mean);
  EXPECT_THROW(kalman_run(params, w, 21), WindowError);
}

TEST(FiniteForward, UniformEmissions) {
  const auto p = test::flat_emission_params(3, 4);
  const FiniteHmm m(p);
  const ObservationWindow<int> w({0, 3, 1, 2, 2, 0});
  const auto fw = finite_forward(m, w, 6);
  Eigen::RowVector3d mu(p.mu0[0], p.mu0[1], p.mu0[2]);
  for (Time n = 0; n <= 6; ++n) {
    EXPECT_NEAR(fw.log_Z[static_cast<std::size_t>(n)], static_cast<double>(n) * std::log(0.25), 1e-13);
    for (Eigen::Index z = 0; z < 3; ++z)
      EXPECT_NEAR(fw.laws[static_cast<std::size_t>(n)][static_cast<std::size_t>(z)], mu[z], 1e-14);
    mu = mu * p.trans;
  }
}

TEST(FiniteForward, ZeroSteps) {
  const auto p = test::two_state_params();
  const auto fw = finite_forward(FiniteHmm(p), ObservationWindow<int>({1}), 0);
  EXPECT_EQ(fw.log_Z.back(), 0.0);
  EXPECT_EQ(fw.laws.back().probabilities(), p.mu0);
}

TEST(FiniteForward, TwoStateThreeStepsByEnumeration) {
  const auto p = test::two_state_params();
  const std::vector<int> ys{0, 1, 1};
  const auto fw = finite_forward(FiniteHmm(p), ObservationWindow<int>(ys), 3);
  const auto en = enumerate_paths(p, ys, 3);
  EXPECT_NEAR(fw.log_Z.back(), std::log(en.Z), 1e-14);
  EXPECT_NEAR(fw.laws.back()[0], en.pi_n[0], 1e-14);
  EXPECT_NEAR(fw.laws.back()[1], en.pi_n[1], 1e-14);
}

TEST(FiniteForward, EnumerationOracleUpToSixSteps) {
  for (const auto& p : {test::two_state_params(), test::three_state_params(), test::demo_params()}) {
    const FiniteHmm m(p);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto w = test::simulated_window(m, 6, seed);
      const auto fw = finite_forward(m, w, 6);
      for (Time n = 0; n <= 6; ++n) {
        const auto en = enumerate_paths(p, w.values(), n);
        EXPECT_NEAR(fw.log_Z[static_cast<std::size_t>(n)] - std::log(en.Z), 0.0, 1e-10);
        EXPECT_LT(test::max_abs(fw.laws[static_cast<std::size_t>(n)].probabilities(), en.pi_n), 1e-12);
      }
    }
  }
}

TEST(FiniteForward, Deterministic) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 40, 8);
  EXPECT_EQ(finite_forward(m, w, 40).log_Z, finite_forward(m, w, 40).log_Z);
}

TEST(Params, InvariantsRejected) {
  auto p = test::two_state_params();
  p.trans(0, 0) = 0.5;
  EXPECT_THROW(FiniteHmm{p}, std::invalid_argument);
  p = test::two_state_params();
  p.emit << 1.0, 0.0, 0.3, 0.7;
  EXPECT_THROW(FiniteHmm{p}, std::invalid_argument);
  EXPECT_TRUE(test::two_state_params().strictly_positive_transitions());
  EXPECT_THROW(LinearGaussianModel(LinearGaussianParams{0.9, 0.0, 1.0, 0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(LinearGaussianParams::stationary(1.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(StochasticVolatilityModel(SvParams{1.0, 0.1, 1.0}), std::invalid_argument);
  EXPECT_THROW(StochasticVolatilityModel(SvParams{0.9, -0.1, 1.0}), std::invalid_argument);
}

TEST(StochasticVolatility, DensityAndSimulation) {
  const SvParams p;
  const StochasticVolatilityModel m(p);
  const double x = 0.4, y = -0.3;
  const double var = p.beta * p.beta * std::exp(x);
  EXPECT_NEAR(m.log_observation_density(x, y), log_normal_pdf(y, 0.0, var), 1e-14);
  const auto path = simulate(m, 20000, 4);
  const auto ms = mean_se(path.hidden);
  EXPECT_NEAR(ms.sd * ms.sd, p.stationary_var(), 0.2 * p.stationary_var());
}

}  // namespace
}  // namespace tpf
