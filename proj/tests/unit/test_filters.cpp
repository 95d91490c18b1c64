#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "common.hpp"
#include "tpf/filters/apf.hpp"
#include "tpf/filters/bootstrap.hpp"
#include "tpf/filters/resample.hpp"
#include "tpf/filters/sis.hpp"
#include "tpf/filters/twisted.hpp"
#include "tpf/harness/stats.hpp"
#include "tpf/oracle/bold.hpp"
#include "tpf/oracle/product.hpp"
#include "tpf/twist/eigen.hpp"
#include "tpf/twist/tabulated.hpp"

namespace tpf {
namespace {

using harness::mean_se;

RunOptions<std::size_t> opts(std::size_t N, Time n, std::uint64_t seed, std::uint64_t rep = 0) {
  RunOptions<std::size_t> o;
  o.N = N;
  o.n = n;
  o.seed = seed;
  o.replicate = rep;
  return o;
}

// Replicate mean of Z_hat / Z at the last step.
template <class Run>
harness::MeanSe ratio_study(std::size_t R, double log_z, Run run) {
  std::vector<double> v(R);
  for (std::size_t r = 0; r < R; ++r) v[r] = std::exp(run(r) - log_z);
  return mean_se(v);
}

// ---- resampling

TEST(Resample, EqualWeightsUniform) {
  const std::vector<double> lw(5, -2.0);
  RngStream rng(1, {});
  const auto anc = multinomial_resample(lw, 100000, rng);
  std::vector<std::size_t> counts(5, 0);
  for (auto a : anc) ++counts[a];
  const double se = std::sqrt(0.2 * 0.8 / 100000.0);
  for (double f : test::frequencies(counts)) EXPECT_NEAR(f, 0.2, 4.0 * se);
}

TEST(Resample, SingleFiniteWeight) {
  const std::vector<double> lw{kNegInf, kNegInf, 0.3, kNegInf};
  RngStream rng(2, {});
  for (auto a : multinomial_resample(lw, 1000, rng)) EXPECT_EQ(a, 2u);
}

TEST(Resample, OneToThreeOdds) {
  const std::vector<double> lw{std::log(1.0), std::log(3.0)};
  RngStream rng(3, {});
  const auto anc = multinomial_resample(lw, 100000, rng);
  const double f = static_cast<double>(std::count(anc.begin(), anc.end(), 1u)) / 1e5;
  EXPECT_NEAR(f, 0.75, 4.0 * std::sqrt(0.75 * 0.25 / 1e5));
}

TEST(Resample, AllMinusInfinityRejected) {
  const std::vector<double> lw{kNegInf, kNegInf};
  RngStream rng(4, {});
  EXPECT_THROW(multinomial_resample(lw, 3, rng), std::invalid_argument);
}

// ---- bootstrap

TEST(Bootstrap, ConstantPotentialIsExact) {
  const FiniteHmm m(test::flat_emission_params(3, 5));
  const auto w = test::simulated_window(m, 20, 1);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto res = bootstrap_run(m, w, opts(7, 20, s));
    for (std::size_t n = 0; n <= 20; ++n)
      EXPECT_NEAR(res.trace.log_Z[n], static_cast<double>(n) * std::log(0.2), 1e-12);
  }
}

TEST(Bootstrap, UnbiasedOnFiniteHmm) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 10, 2);
  const double lz = finite_forward(m, w, 10).log_Z.back();
  const auto ms = ratio_study(10000, lz, [&](std::size_t r) {
    return bootstrap_run(m, w, opts(50, 10, 3, r)).trace.log_Z.back();
  });
  EXPECT_NEAR(ms.mean, 1.0, 4.0 * ms.se);
}

TEST(Bootstrap, PredictionFilterConsistency) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 10, 5);
  const double exact = finite_forward(m, w, 10).laws.back()[0];
  std::vector<double> eta;
  for (std::uint64_t r = 0; r < 40; ++r) {
    auto o = opts(10000, 10, 6, r);
    o.tests = {{"ind0", [](const std::size_t& x) { return x == 0 ? 1.0 : 0.0; }}};
    eta.push_back(bootstrap_run(m, w, o).trace.eta_phi[0].back());
  }
  const auto ms = mean_se(eta);
  EXPECT_LT(std::abs(ms.mean - exact), 4.0 * ms.se);
}

TEST(Bootstrap, TraceShapeAndErrors) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 5, 5);
  const auto res = bootstrap_run(m, w, opts(4, 5, 1));
  EXPECT_EQ(res.trace.log_Z.size(), 6u);
  EXPECT_EQ(res.trace.log_Z[0], 0.0);
  EXPECT_THROW(bootstrap_run(m, w, opts(4, 6, 1)), WindowError);
  EXPECT_THROW(bootstrap_run(m, w, opts(0, 5, 1)), std::invalid_argument);
}

TEST(Bootstrap, Deterministic) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 30, 5);
  auto o = opts(25, 30, 77, 3);
  o.tests = {{"x", [](const std::size_t& x) { return static_cast<double>(x); }}};
  const auto a = bootstrap_run(m, w, o), b = bootstrap_run(m, w, o);
  EXPECT_EQ(a.trace.log_Z, b.trace.log_Z);
  EXPECT_EQ(a.trace.eta_phi, b.trace.eta_phi);
  EXPECT_EQ(a.final, b.final);
}

// Relabelling the cloud leaves the step's estimator unchanged, and the law
// of the next cloud (as a multiset) is the same.
TEST(Bootstrap, ExchangeableStandardStep) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 5, 5);
  const std::vector<std::size_t> cloud{0, 2, 1, 1, 0, 2, 2};
  std::vector<std::size_t> perm = cloud;
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 3, perm.end());
  std::vector<std::size_t> ca(3, 0), cb(3, 0);
  for (std::uint64_t r = 0; r < 20000; ++r) {
    const auto a = standard_step(m, w, 2, cloud, 9, r);
    const auto b = standard_step(m, w, 2, perm, 9, r);
    ASSERT_NEAR(a.lse_g, b.lse_g, 1e-14);
    for (auto x : a.next) ++ca[x];
    for (auto x : b.next) ++cb[x];
  }
  EXPECT_LT(test::total_variation(test::frequencies(ca), test::frequencies(cb)), 0.01);
}

// ---- twisted

TEST(Twisted, ConstantTwistHasUnitPhi) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 40, 3);
  const ConstantTwist<FiniteHmm> c(m);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto res = twisted_run(m, c, w, opts(9, 40, 2, r));
    for (double v : res.trace.log_phi) EXPECT_EQ(v, 0.0);
  }
}

TEST(Twisted, ConstantTwistAgreesWithBootstrap) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 20, 3);
  const ConstantTwist<FiniteHmm> c(m);
  std::vector<double> a, b;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    a.push_back(twisted_run(m, c, w, opts(5, 20, 2, r)).trace.log_Z.back());
    b.push_back(bootstrap_run(m, w, opts(5, 20, 3, r)).trace.log_Z.back());
  }
  const auto ma = mean_se(a), mb = mean_se(b);
  EXPECT_NEAR(ma.mean, mb.mean, 4.0 * harness::pooled_se(ma.se, mb.se));
}

TEST(Twisted, UnbiasedForLagAndExactTwists) {
  const auto env = test::demo_env();
  const Time n = 8;
  const double lz = finite_forward(env.model, env.w, n).log_Z.back();
  const auto check = [&](const auto& tw, const char* name) {
    const auto ms = ratio_study(10000, lz, [&](std::size_t r) {
      return twisted_run(env.model, tw, env.w, opts(10, n, 5, r)).trace.log_Z.back();
    });
    EXPECT_NEAR(ms.mean, 1.0, 4.0 * ms.se) << name;
  };
  check(lag_twist_finite(env.model, env.full, 1), "lag1");
  check(lag_twist_finite(env.model, env.full, 2), "lag2");
  check(exact_h_twist(env.model, env.full), "exact_h");
}

TEST(Twisted, FactorizationWithinEveryRun) {
  const auto env = test::demo_env();
  const auto tw = lag_twist_finite(env.model, env.full, 2);
  for (std::uint64_t r = 0; r < 30; ++r) {
    const auto res = twisted_run(env.model, tw, env.w, opts(6, 50, 8, r));
    const auto& std_z = res.trace.aux.at("log_Z_standard");
    double acc = 0.0;
    for (std::size_t n = 0; n < res.trace.log_Z.size(); ++n) {
      acc += res.trace.log_phi[n];
      EXPECT_NEAR(res.trace.log_Z[n], std_z[n] + acc, 1e-10);
    }
  }
}

TEST(Twisted, ExactHIdentityPerRun) {
  const auto env = test::demo_env();
  const auto tw = exact_h_twist(env.model, env.full);
  const Time n = 100, off = env.w.origin() == 0 ? 0 : -env.w.origin();
  const auto tr = finite_h(env.model, env.full, off, off + n);
  double sum_log_lambda = 0.0;
  for (Time p = 0; p < n; ++p) sum_log_lambda += tr.log_lambda[static_cast<std::size_t>(p)];
  const auto h_bold = [&](Time t, const std::vector<std::size_t>& cloud) {
    double s = 0.0;
    for (auto x : cloud) s += tr.h_at(off + t)[x];
    return s / static_cast<double>(cloud.size());
  };
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto res = twisted_run(env.model, tw, env.w, opts(5, n, 21, r));
    const double rhs = sum_log_lambda + std::log(h_bold(0, res.initial)) - std::log(h_bold(n, res.final));
    EXPECT_NEAR(res.trace.log_Z.back(), rhs, 1e-9);
  }
}

TEST(Twisted, LookaheadShortfallAndBadN) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 10, 3);
  const auto tw = lag_twist_finite(m, w, 3);
  EXPECT_THROW(twisted_run(m, tw, w, opts(4, 8, 1)), WindowError);
  EXPECT_NO_THROW(twisted_run(m, tw, w, opts(4, 7, 1)));
  EXPECT_THROW(twisted_run(m, tw, w, opts(0, 3, 1)), std::invalid_argument);
}

// ---- one-step particle kernels against the oracle rows, N = 2

template <class Step>
void expect_step_matches(const std::vector<double>& row, const ProductSpace& ps, Step step) {
  std::vector<std::size_t> counts(ps.size(), 0);
  for (std::uint64_t r = 0; r < 100000; ++r) ++counts[ps.index(step(r))];
  EXPECT_LT(test::total_variation(test::frequencies(counts), row), 0.01);
}

TEST(OneStepKernel, StandardAndTwistedMatchBoldRows) {
  const auto env = test::demo_env();
  const auto tw = lag_twist_finite(env.model, env.full, 2);
  const Time t = 4;
  const auto bk = build_bold_kernels(env.model, tw, 2, env.w, t);
  const ProductSpace ps(3, 2, kDenseGuard);
  for (std::size_t x : {0u, 5u, 7u}) {
    const std::vector<std::size_t> cloud{ps.digit(x, 0), ps.digit(x, 1)};
    const auto xi = static_cast<Eigen::Index>(x);
    std::vector<double> mrow(bk.M_bold.cols()), trow(bk.M_tilde.cols());
    for (Eigen::Index j = 0; j < bk.M_bold.cols(); ++j) {
      mrow[static_cast<std::size_t>(j)] = bk.M_bold(xi, j);
      trow[static_cast<std::size_t>(j)] = bk.M_tilde(xi, j);
    }
    expect_step_matches(mrow, ps, [&](std::uint64_t r) {
      return standard_step(env.model, env.w, t, cloud, 3, r).next;
    });
    expect_step_matches(trow, ps, [&](std::uint64_t r) {
      return twisted_step(env.model, tw, env.w, t, cloud, 3, r).next;
    });
  }
}

// ---- APF

TEST(Apf, ConstantWeightIsBootstrap) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 30, 3);
  const ConstantTwist<FiniteHmm> r(m);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto a = apf_run(m, r, w, opts(11, 30, 4, rep));
    const auto b = bootstrap_run(m, w, opts(11, 30, 4, rep));
    EXPECT_EQ(a.final, b.final);
    for (std::size_t n = 0; n < a.trace.log_Z.size(); ++n)
      EXPECT_NEAR(a.trace.log_Z[n], b.trace.log_Z[n], 1e-12);
  }
}

TEST(Apf, FullyAdaptedUnbiased) {
  const auto env = test::demo_env();
  const auto g = lag_twist_finite(env.model, env.full, 1);  // r = g
  const Time n = 10;
  const double lz = finite_forward(env.model, env.w, n).log_Z.back();
  const auto ms = ratio_study(10000, lz, [&](std::size_t r) {
    return apf_run(env.model, g, env.w, opts(10, n, 6, r)).trace.log_Z.back();
  });
  EXPECT_NEAR(ms.mean, 1.0, 4.0 * ms.se);
}

TEST(Apf, IdealWeightHasConstantPotential) {
  const auto env = test::demo_env();
  const auto h = exact_h_twist(env.model, env.full);
  for (std::uint64_t r = 0; r < 10; ++r) {
    const auto res = apf_run(env.model, h, env.w, opts(50, 100, 7, r));
    const auto& osc = res.trace.aux.at("log_G_osc");
    for (std::size_t p = 0; p < 100; ++p) EXPECT_LT(osc[p], 1e-8);
  }
}

TEST(Apf, WeightedEstimateConvergesToFilter) {
  const auto env = test::demo_env();
  const auto g = lag_twist_finite(env.model, env.full, 1);
  const Time n = 10;
  const double exact = finite_forward(env.model, env.w, n).laws.back()[0];
  std::vector<double> est;
  for (std::uint64_t r = 0; r < 40; ++r) {
    auto o = opts(10000, n, 8, r);
    o.tests = {{"ind0", [](const std::size_t& x) { return x == 0 ? 1.0 : 0.0; }}};
    est.push_back(apf_run(env.model, g, env.w, o).trace.aux.at("weighted_ind0").back());
  }
  const auto ms = mean_se(est);
  EXPECT_LT(std::abs(ms.mean - exact), 4.0 * ms.se);
}

// ---- SIS

TEST(Sis, SingleChainIsSingleParticleBootstrap) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 25, 3);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto a = sis_run(m, w, opts(1, 25, 5, r));
    const auto b = bootstrap_run(m, w, opts(1, 25, 5, r));
    EXPECT_EQ(a.final, b.final);
    EXPECT_EQ(a.trace.log_Z, b.trace.log_Z);
  }
}

// Replays each chain's streams and sums log G along its path.
TEST(Sis, WeightIsProductOfPotentials) {
  const FiniteHmm m(test::three_state_params());
  const auto w = test::simulated_window(m, 15, 3);
  const auto o = opts(4, 15, 2, 1);
  const auto res = sis_run(m, w, o);
  const auto& logw = res.trace.aux.at("chain_log_w");
  for (std::size_t i = 0; i < 4; ++i) {
    RngStream r0(o.seed, {o.replicate, 0, i, Purpose::kInitial});
    std::size_t x = m.sample_initial(w, r0);
    double acc = 0.0;
    for (Time p = 0; p < o.n; ++p) {
      acc += m.log_potential(w, p, x);
      RngStream rp(o.seed, {o.replicate, static_cast<std::uint64_t>(p + 1), i, Purpose::kMutate});
      x = m.sample_mutation(w, p, x, rp);
    }
    EXPECT_EQ(logw[i], acc);
    EXPECT_EQ(res.final[i], x);
  }
}

TEST(Sis, UnbiasedWithAndWithoutProposal) {
  const auto env = test::demo_env();
  const Time n = 8;
  const double lz = finite_forward(env.model, env.w, n).log_Z.back();
  const auto check = [&](const RunResult<std::size_t>& res) {
    std::vector<double> wts;
    for (double lw : res.trace.aux.at("chain_log_w")) wts.push_back(std::exp(lw - lz));
    const auto ms = mean_se(wts);
    EXPECT_NEAR(ms.mean, 1.0, 4.0 * ms.se);
    EXPECT_NEAR(res.trace.log_Z.back() - lz, std::log(ms.mean), 1e-12);
  };
  check(sis_run(env.model, env.w, opts(10000, n, 4)));
  check(sis_run(env.model, lag_twist_finite(env.model, env.full, 2), env.w, opts(10000, n, 4)));
}

}  // namespace
}  // namespace tpf
