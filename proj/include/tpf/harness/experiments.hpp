#pragma once

// Experiment suites. Each returns its numbers and, when given an output
// directory, writes CSVs there. Replicates are aggregated in index order, so
// results depend only on (config, seed).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tpf/harness/config.hpp"
#include "tpf/harness/scheduler.hpp"
#include "tpf/harness/setup.hpp"
#include "tpf/harness/stats.hpp"
#include "tpf/oracle/bold.hpp"
#include "tpf/oracle/bound.hpp"
#include "tpf/oracle/clt.hpp"
#include "tpf/oracle/moments.hpp"
#include "tpf/oracle/slope.hpp"

namespace tpf::harness {

namespace fs = std::filesystem;

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Outcome {
  std::vector<std::string> files;  // relative to the output directory
  std::vector<Check> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

// CSV writer with round-trip precision. Registers the file in the outcome.
class Csv {
 public:
  Csv(const std::optional<fs::path>& dir, const std::string& name, Outcome& outcome) {
    if (!dir) return;
    fs::create_directories(*dir);
    os_.open(*dir / name);
    if (!os_) throw std::runtime_error("cannot write " + (*dir / name).string());
    os_.precision(17);
    outcome.files.push_back(name);
  }
  template <class... T>
  void row(const T&... v) {
    if (!os_.is_open()) return;
    bool first = true;
    ((os_ << (first ? "" : ",") << v, first = false), ...);
    os_ << '\n';
  }

 private:
  std::ofstream os_;
};

inline void write_checks(const std::optional<fs::path>& dir, const std::string& name,
                         Outcome& outcome) {
  Csv csv(dir, name, outcome);
  csv.row("check", "value", "threshold", "pass");
  for (const auto& c : outcome.checks) csv.row(c.name, c.value, c.threshold, c.pass ? 1 : 0);
}

template <class Model>
RunOptions<typename Model::State> options(const ExperimentConfig& c, std::size_t N,
                                          std::uint64_t replicate, bool with_tests,
                                          const Model& model) {
  RunOptions<typename Model::State> opt;
  opt.N = N;
  opt.n = c.steps;
  opt.seed = c.seed;
  opt.replicate = replicate;
  if (with_tests) opt.tests = test_functions(c, model);
  return opt;
}

// ---------------------------------------------------------------- run, simulate

template <class Model>
Outcome run_single(const ExperimentConfig& c, const Environment<Model>& env,
                   const std::optional<fs::path>& dir) {
  Outcome out;
  with_twist(env, c.twist, [&](const auto& twist) {
    const auto res = run_filter(c.filter, env.model, twist, env.w,
                                options(c, c.particles, 0, true, env.model));
    if (dir) {
      fs::create_directories(*dir);
      std::ofstream os(*dir / "trace.csv");
      write_trace_csv(os, res.trace);
      out.files.push_back("trace.csv");
    }
    return 0;
  });
  return out;
}

template <class Model>
Outcome run_simulate(const ExperimentConfig&, const Environment<Model>& env,
                     const std::optional<fs::path>& dir) {
  Outcome out;
  if (dir) {
    fs::create_directories(*dir);
    std::ofstream os(*dir / "path.csv");
    write_path_csv(os, env.path);
    out.files.push_back("path.csv");
  }
  return out;
}

// ---------------------------------------------------------------- variance growth

struct VarianceRow {
  Time n = 0;
  double v_hat_minus_1 = 0.0;
  double log_v_over_n = 0.0;
  double se = 0.0;  // of log_v_over_n
};

struct VarianceCurve {
  TwistSpec twist;
  std::string filter;
  std::size_t N = 0;
  std::vector<VarianceRow> rows;  // n = 0..steps
  double slope = 0.0;             // OLS of log V_hat on n over the fit range
  double slope_se = 0.0;          // grouped jackknife
  Time fit_first = 0, fit_last = 0;
  std::optional<double> oracle_slope;  // same fit on the exact V_tilde
};

struct VarianceReport {
  std::vector<VarianceCurve> curves;
  bool exact_reference = false;
  Outcome outcome;
};

inline std::vector<TwistSpec> sweep_specs(const ExperimentConfig& c) {
  if (c.lags.empty()) return {c.twist};
  std::vector<TwistSpec> out;
  for (int l : c.lags) {
    TwistSpec s = c.twist;
    if (s.kind == "constant") s.kind = "lag";
    s.ell = l;
    out.push_back(s);
  }
  return out;
}

inline double fit_slope(const std::vector<double>& log_v, Time first, Time last) {
  std::vector<double> xs, ys;
  for (Time n = first; n <= last; ++n) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(log_v[static_cast<std::size_t>(n)]);
  }
  return ols_fit(xs, ys).slope;
}

// Exact slope for the configurations the oracle covers: finite model, k^N
// under the guard, and a sampler that is the twisted particle system (SIS is
// its N = 1 case).
template <class Model, class Twist>
std::optional<double> oracle_variance_slope(const ExperimentConfig& c, const Environment<Model>& env,
                                            const Twist& twist, Time first, Time last) {
  if constexpr (std::is_same_v<Model, FiniteHmm> && FiniteTwistFor<Twist, Model>) {
    const double size = std::pow(static_cast<double>(env.model.num_states()),
                                 static_cast<double>(c.particles));
    if (size > static_cast<double>(kStreamingGuard)) return std::nullopt;
    std::optional<MomentsReport> rep;
    if (c.filter == "bootstrap")
      rep = exact_moments(env.model, ConstantTwist<FiniteHmm>(env.model), c.particles, env.w, last);
    else if (c.filter == "twisted" || (c.filter == "sis" && c.particles == 1))
      rep = exact_moments(env.model, twist, c.particles, env.w, last);
    if (!rep) return std::nullopt;
    std::vector<double> lv;
    for (double v : rep->V_tilde) lv.push_back(std::log(v));
    return fit_slope(lv, first, last);
  } else {
    return std::nullopt;
  }
}

template <class Model>
VarianceReport variance_growth(const ExperimentConfig& c, const Environment<Model>& env,
                               const std::optional<fs::path>& dir) {
  if (c.fit_first < 1 || c.fit_last > c.steps || c.fit_last - c.fit_first + 1 < 3)
    throw ConfigError("fit_first", "slope range must lie in [1, steps] with >= 3 points");
  if (c.jackknife_groups > c.replicates)
    throw ConfigError("jackknife_groups", "cannot exceed replicates");
  VarianceReport rep;
  const auto ref = exact_reference(env, c, c.steps);
  rep.exact_reference = ref.has_value();
  const auto len = static_cast<std::size_t>(c.steps) + 1;

  std::vector<std::vector<std::vector<double>>> log_z;  // [curve][replicate][n]
  for (const auto& spec : sweep_specs(c)) {
    VarianceCurve curve;
    curve.twist = spec;
    curve.filter = c.filter;
    curve.N = c.particles;
    curve.fit_first = c.fit_first;
    curve.fit_last = c.fit_last;
    with_twist(env, spec, [&](const auto& twist) {
      log_z.push_back(run_replicates<std::vector<double>>(
          c.replicates, c.workers, [&](std::size_t r) {
            return run_filter(c.filter, env.model, twist, env.w,
                              options(c, c.particles, r, false, env.model))
                .trace.log_Z;
          }));
      curve.oracle_slope = oracle_variance_slope(c, env, twist, c.fit_first, c.fit_last);
      return 0;
    });
    rep.curves.push_back(std::move(curve));
  }

  // Reference log Z_n: exact, or the pooled replicate mean over every curve.
  std::vector<double> log_ref(len, 0.0);
  if (ref) {
    log_ref = ref->log_Z;
  } else {
    for (std::size_t n = 0; n < len; ++n) {
      std::vector<double> all;
      for (const auto& curve : log_z)
        for (const auto& v : curve) all.push_back(v[n]);
      log_ref[n] = log_mean_exp(all);
    }
  }

  for (std::size_t j = 0; j < rep.curves.size(); ++j) {
    auto& curve = rep.curves[j];
    const auto& reps = log_z[j];
    const auto log_v_of = [&](const std::vector<std::size_t>& idx) {
      std::vector<double> lv(len, 0.0);
      std::vector<double> ratio(idx.size());
      for (std::size_t n = 1; n < len; ++n) {
        for (std::size_t i = 0; i < idx.size(); ++i) ratio[i] = reps[idx[i]][n] - log_ref[n];
        lv[n] = log_relative_second_moment(ratio).log_v;
      }
      return lv;
    };
    std::vector<double> ratio(reps.size());
    std::vector<double> lv(len, 0.0);
    for (std::size_t n = 0; n < len; ++n) {
      VarianceRow row;
      row.n = static_cast<Time>(n);
      if (n > 0) {
        for (std::size_t r = 0; r < reps.size(); ++r) ratio[r] = reps[r][n] - log_ref[n];
        const auto m = log_relative_second_moment(ratio);
        lv[n] = m.log_v;
        row.v_hat_minus_1 = std::expm1(m.log_v);
        row.log_v_over_n = m.log_v / static_cast<double>(n);
        row.se = m.se_log_v / static_cast<double>(n);
      }
      curve.rows.push_back(row);
    }
    curve.slope = fit_slope(lv, c.fit_first, c.fit_last);
    curve.slope_se = grouped_jackknife_se(
        reps.size(), c.jackknife_groups, [&](const std::vector<std::size_t>& idx) {
          return fit_slope(log_v_of(idx), c.fit_first, c.fit_last);
        });
  }

  Csv csv(dir, "variance_growth.csv", rep.outcome);
  csv.row("n", "v_hat_minus_1", "log_v_over_n", "se", "N", "ell", "filter");
  for (const auto& curve : rep.curves)
    for (const auto& r : curve.rows)
      csv.row(r.n, r.v_hat_minus_1, r.log_v_over_n, r.se, curve.N, curve.twist.ell, curve.filter);
  Csv sum(dir, "variance_growth_summary.csv", rep.outcome);
  sum.row("twist", "ell", "filter", "N", "fit_first", "fit_last", "slope", "slope_se",
          "oracle_slope", "reference");
  for (const auto& curve : rep.curves)
    sum.row(curve.twist.kind, curve.twist.ell, curve.filter, curve.N, curve.fit_first,
            curve.fit_last, curve.slope, curve.slope_se,
            curve.oracle_slope ? std::to_string(*curve.oracle_slope) : std::string(),
            rep.exact_reference ? "exact" : "pooled");
  return rep;
}

// ---------------------------------------------------------------- CLT

struct CltRow {
  std::size_t N = 0;
  std::string phi;
  double emp_var_eta = 0.0, exact_sigma2 = 0.0;
  double emp_var_gamma = 0.0, exact_varsigma2 = 0.0;
  double se_eta = 0.0, se_gamma = 0.0;
};

struct CltReport {
  std::vector<CltRow> rows;
  Outcome outcome;
};

// Empirical N * E[(estimate - exact)^2] across replicates, centred at the
// exact value, against the exact asymptotic variances.
template <class Model>
CltReport clt_check(const ExperimentConfig& c, const Environment<Model>& env,
                    const std::optional<fs::path>& dir) {
  if constexpr (!std::is_same_v<Model, FiniteHmm>) {
    throw ConfigError("model.kind", "clt-check needs a finite model for the exact variances");
  } else {
    if (c.filter != "bootstrap" && c.filter != "twisted")
      throw ConfigError("filter", "clt-check supports bootstrap and twisted filters");
    CltReport rep;
    const auto phi = finite_phi(c, env.model.num_states());
    const TwistSpec spec = c.filter == "bootstrap" ? TwistSpec{} : c.twist;
    const auto grid = c.particle_grid.empty() ? std::vector<std::size_t>{c.particles}
                                              : c.particle_grid;
    with_twist(env, spec, [&](const auto& twist) {
      // sigma2 for eta(phi); varsigma2 for gamma(1), the likelihood estimate
      const auto exact = exact_clt_variances(env.model, twist, phi, env.w, c.steps);
      const auto exact_one = exact_clt_variances(
          env.model, twist, std::vector<double>(env.model.num_states(), 1.0), env.w, c.steps);
      const double Z = std::exp(exact.log_Z);
      for (std::size_t N : grid) {
        struct Err {
          double eta = 0.0, gamma = 0.0;
        };
        const auto errs = run_replicates<Err>(c.replicates, c.workers, [&](std::size_t r) {
          const auto res = run_filter(c.filter, env.model, twist, env.w,
                                      options(c, N, r, true, env.model));
          const auto k = static_cast<std::size_t>(c.steps);
          return Err{res.trace.eta_phi[0][k] - exact.eta_phi,
                     std::exp(res.trace.log_Z[k]) - Z};
        });
        std::vector<double> se2(errs.size()), sg2(errs.size());
        const double Nd = static_cast<double>(N);
        for (std::size_t r = 0; r < errs.size(); ++r) {
          se2[r] = Nd * errs[r].eta * errs[r].eta;
          sg2[r] = Nd * errs[r].gamma * errs[r].gamma;
        }
        const auto me = mean_se(se2), mg = mean_se(sg2);
        rep.rows.push_back({N, "phi", me.mean, exact.sigma2, mg.mean, exact_one.varsigma2, me.se,
                            mg.se});
      }
      return 0;
    });
    Csv csv(dir, "clt.csv", rep.outcome);
    csv.row("N", "phi", "emp_var_eta", "exact_sigma2", "emp_var_gamma", "exact_varsigma2",
            "se_eta", "se_gamma");
    for (const auto& r : rep.rows)
      csv.row(r.N, r.phi, r.emp_var_eta, r.exact_sigma2, r.emp_var_gamma, r.exact_varsigma2,
              r.se_eta, r.se_gamma);
    return rep;
  }
}

// ---------------------------------------------------------------- unbiasedness

struct UnbiasRow {
  Time n = 0;
  double mean_ratio = 0.0;  // replicate mean of Z_hat / Z
  double se = 0.0;
  double z = 0.0;
};

struct UnbiasReport {
  std::vector<UnbiasRow> rows;  // n = 1..steps
  Outcome outcome;
};

template <class Model>
UnbiasReport unbiasedness(const ExperimentConfig& c, const Environment<Model>& env,
                          const std::optional<fs::path>& dir) {
  const auto ref = exact_reference(env, c, c.steps);
  if (!ref) throw ConfigError("model.kind", "unbiasedness needs an exact reference (finite or lg)");
  UnbiasReport rep;
  with_twist(env, c.twist, [&](const auto& twist) {
    const auto log_z = run_replicates<std::vector<double>>(
        c.replicates, c.workers, [&](std::size_t r) {
          return run_filter(c.filter, env.model, twist, env.w,
                            options(c, c.particles, r, false, env.model))
              .trace.log_Z;
        });
    for (Time n = 1; n <= c.steps; ++n) {
      const auto k = static_cast<std::size_t>(n);
      std::vector<double> w(log_z.size());
      for (std::size_t r = 0; r < w.size(); ++r) w[r] = std::exp(log_z[r][k] - ref->log_Z[k]);
      const auto m = mean_se(w);
      const double z = m.se > 0.0 ? (m.mean - 1.0) / m.se : (m.mean == 1.0 ? 0.0 : INFINITY);
      rep.rows.push_back({n, m.mean, m.se, z});
    }
    return 0;
  });
  for (const auto& r : rep.rows)
    rep.outcome.checks.push_back({"unbiased_n" + std::to_string(r.n), std::abs(r.z), 4.0,
                                  std::abs(r.z) < 4.0});
  Csv csv(dir, "unbiasedness.csv", rep.outcome);
  csv.row("n", "mean_ratio", "se", "z", "pass", "filter", "twist", "ell", "N");
  for (const auto& r : rep.rows)
    csv.row(r.n, r.mean_ratio, r.se, r.z, std::abs(r.z) < 4.0 ? 1 : 0, c.filter, c.twist.kind,
            c.twist.ell, c.particles);
  return rep;
}

// ---------------------------------------------------------------- oracle

struct OracleSummaryRow {
  std::string twist;
  std::size_t N = 0;
  double slope = 0.0, slope_stderr = 0.0, bound = 0.0;
  double keystone_rel_err = 0.0;
  Time fit_first = 0, fit_last = 0;
  std::vector<double> V_tilde, log_V_over_n;  // n = 0..n_last
};

struct OracleReport {
  std::vector<OracleSummaryRow> rows;
  double r_tilde_max_err = 0.0;
  Outcome outcome;
};

// The four reference twists on the demo path: constant, lag-1, lag-2, exact h.
template <class F>
void for_reference_twists(const Environment<FiniteHmm>& env, F&& f) {
  f("constant", ConstantTwist<FiniteHmm>(env.model));
  f("lag1", lag_twist_finite(env.model, env.full, 1));
  f("lag2", lag_twist_finite(env.model, env.full, 2));
  f("exact_h", exact_h_twist(env.model, env.full));
}

inline std::pair<Time, Time> eval_range(const ExperimentConfig& c) {
  const Time first = c.oracle.eval_first >= 0 ? c.oracle.eval_first : c.window.burn_in;
  const Time last = c.oracle.eval_last >= 0 ? c.oracle.eval_last
                                            : c.window.burn_in + c.oracle.n_last;
  return {first, last};
}

inline EigenTriple oracle_triple(const ExperimentConfig& c, const Environment<FiniteHmm>& env) {
  const auto [first, last] = eval_range(c);
  if (last >= env.full.length())
    throw WindowError(last, env.full.origin(), env.full.end());
  return finite_h(env.model, env.full, first, last, c.twist.tol);
}

template <class Model>
OracleReport oracle_check(const ExperimentConfig& c, const Environment<Model>& env,
                          const std::optional<fs::path>& dir) {
  if constexpr (!std::is_same_v<Model, FiniteHmm>) {
    throw ConfigError("model.kind", "oracle-check needs a finite model");
  } else {
    constexpr Time kKeystoneSteps = 6;
    OracleReport rep;
    const auto triple = oracle_triple(c, env);
    const std::size_t k = env.model.num_states();
    env.w.require(0, c.oracle.n_last + 3);
    std::vector<double> const_slopes;

    for_reference_twists(env, [&](const std::string& name, const auto& twist) {
      double key = 0.0;
      const auto ks = exact_moments(env.model, twist, 2, env.w, kKeystoneSteps);
      for (std::size_t n = 0; n < ks.log_first.size(); ++n)
        key = std::max(key, std::abs(std::expm1(ks.log_first[n] - ks.log_Z[n])));
      rep.outcome.checks.push_back({"keystone_" + name, key, 1e-10, key < 1e-10});

      const auto bnd = upsilon_bound(triple, twist, env.full, k);
      for (std::size_t N : c.oracle.particles) {
        const auto m = exact_moments(env.model, twist, N, env.w, c.oracle.n_last);
        const auto fit = fit_log_v_slope(m.V_tilde, c.oracle.n_first, c.oracle.n_last);
        const double b = N >= 2 ? bnd.bound(N) : INFINITY;
        rep.rows.push_back({name, N, fit.slope, fit.slope_stderr, b, key, fit.n_first,
                            fit.n_last, m.V_tilde, m.log_V_over_n});
        if (name == "constant") const_slopes.push_back(fit.slope);
        if (name == "exact_h")
          rep.outcome.checks.push_back({"h_slope_N" + std::to_string(N), std::abs(fit.slope),
                                        1e-4, std::abs(fit.slope) < 1e-4});
        if (name != "exact_h" && N >= 2 && N <= 3)
          rep.outcome.checks.push_back({"bound_ge_slope_" + name + "_N" + std::to_string(N),
                                        b - fit.slope, 0.0, fit.slope <= b});
        if (name == "constant" && N == 2)
          rep.outcome.checks.push_back({"constant_slope_N2", fit.slope, 1e-3, fit.slope > 1e-3});
      }
      if (name == "exact_h")
        rep.outcome.checks.push_back({"h_bound_zero", bnd.D, 1e-12, bnd.D < 1e-12});
    });

    // Bootstrap N sweep: slope decreasing in N.
    const auto& Ns = c.oracle.particles;
    for (std::size_t i = 1; i < const_slopes.size(); ++i)
      rep.outcome.checks.push_back({"bootstrap_decreasing_N" + std::to_string(Ns[i]),
                                    const_slopes[i - 1] - const_slopes[i], 0.0,
                                    const_slopes[i] < const_slopes[i - 1]});

    // Entrywise R_tilde identity at N = 2.
    {
      const auto lag2 = lag_twist_finite(env.model, env.full, 2);
      const auto bk = build_bold_kernels(env.model, lag2, 2, env.w, 3);
      const Eigen::MatrixXd rhs =
          (bk.G_bold.array().square().matrix().asDiagonal() * bk.M_bold).cwiseProduct(bk.phi);
      const double scale = bk.R_tilde.cwiseAbs().maxCoeff();
      rep.r_tilde_max_err = (bk.R_tilde - rhs).cwiseAbs().maxCoeff() / scale;
      rep.outcome.checks.push_back(
          {"r_tilde_identity", rep.r_tilde_max_err, 1e-12, rep.r_tilde_max_err < 1e-12});
    }

    for (const auto& r : rep.rows) {
      Csv csv(dir, "oracle_" + r.twist + "_N" + std::to_string(r.N) + ".csv", rep.outcome);
      csv.row("n", "V_tilde", "log_V_over_n");
      for (std::size_t n = 0; n < r.V_tilde.size(); ++n) csv.row(n, r.V_tilde[n], r.log_V_over_n[n]);
    }
    Csv sum(dir, "oracle_summary.csv", rep.outcome);
    sum.row("twist", "N", "slope", "slope_stderr", "bound", "fit_first", "fit_last",
            "keystone_rel_err");
    for (const auto& r : rep.rows)
      sum.row(r.twist, r.N, r.slope, r.slope_stderr, r.bound, r.fit_first, r.fit_last,
              r.keystone_rel_err);
    write_checks(dir, "oracle_checks.csv", rep.outcome);
    return rep;
  }
}

// ---------------------------------------------------------------- bound

struct BoundRow {
  std::string twist;
  int ell = 0;
  double D = 0.0, max_C = 0.0, max_osc = 0.0;
  std::vector<std::pair<std::size_t, double>> bounds;  // (N, bound)
};

struct BoundSweep {
  std::vector<BoundRow> rows;
  Outcome outcome;
};

template <class Model>
BoundSweep bound_sweep(const ExperimentConfig& c, const Environment<Model>& env,
                       const std::optional<fs::path>& dir) {
  if constexpr (!std::is_same_v<Model, FiniteHmm>) {
    throw ConfigError("model.kind", "bound needs a finite model");
  } else {
    BoundSweep rep;
    const auto triple = oracle_triple(c, env);
    const std::size_t k = env.model.num_states();
    const auto add = [&](const std::string& name, int ell, const BoundReport& b) {
      BoundRow row{name, ell, b.D, b.max_C, b.max_osc, {}};
      for (std::size_t N : c.oracle.particles)
        if (N >= 2) row.bounds.emplace_back(N, b.bound(N));
      rep.rows.push_back(std::move(row));
    };
    for (int l : c.oracle.bound_lags)
      add("lag", l, upsilon_bound(triple, lag_twist_finite(env.model, env.full, l), env.full, k));
    add("exact_h", -1, upsilon_bound(triple, exact_h_twist(env.model, env.full), env.full, k));
    for (std::size_t i = 1; i + 1 < rep.rows.size(); ++i)
      rep.outcome.checks.push_back({"D_decreasing_ell" + std::to_string(rep.rows[i].ell),
                                    rep.rows[i - 1].D - rep.rows[i].D, 0.0,
                                    rep.rows[i].D < rep.rows[i - 1].D});
    rep.outcome.checks.push_back({"h_bound_zero", rep.rows.back().D, 1e-12,
                                  rep.rows.back().D < 1e-12});
    Csv csv(dir, "bound.csv", rep.outcome);
    csv.row("twist", "ell", "D", "max_C", "max_osc", "N", "bound");
    for (const auto& r : rep.rows)
      for (const auto& [N, b] : r.bounds) csv.row(r.twist, r.ell, r.D, r.max_C, r.max_osc, N, b);
    write_checks(dir, "bound_checks.csv", rep.outcome);
    return rep;
  }
}

// ---------------------------------------------------------------- dispatch

// Runs c.experiment and writes its CSVs (none when dir is empty).
inline Outcome run_experiment(const ExperimentConfig& c, const std::optional<fs::path>& dir) {
  return with_model(c, [&](auto model) -> Outcome {
    const auto env = make_environment(c, std::move(model));
    if (c.experiment == "simulate") return run_simulate(c, env, dir);
    if (c.experiment == "run") return run_single(c, env, dir);
    if (c.experiment == "variance-growth") return variance_growth(c, env, dir).outcome;
    if (c.experiment == "clt-check") return clt_check(c, env, dir).outcome;
    if (c.experiment == "unbiasedness") return unbiasedness(c, env, dir).outcome;
    if (c.experiment == "oracle-check") return oracle_check(c, env, dir).outcome;
    if (c.experiment == "bound") return bound_sweep(c, env, dir).outcome;
    throw ConfigError("experiment", "unknown experiment '" + c.experiment + "'");
  });
}

}  // namespace tpf::harness
