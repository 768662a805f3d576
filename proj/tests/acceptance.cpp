// Acceptance suite: runs every contract criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits non-zero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "winshift/blasso.hpp"
#include "winshift/dataset.hpp"
#include "winshift/diagnostics.hpp"
#include "winshift/metrics.hpp"
#include "winshift/rng.hpp"
#include "winshift/shifts.hpp"
#include "winshift/simgen.hpp"
#include "winshift/stats.hpp"
#include "winshift/wpgrid.hpp"

using namespace winshift;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// Shared pipeline state produced by the recovery study and reused by the
// later criteria.
struct RecoveryState {
  SimResult sim;
  WinProbGrid grid;
  std::vector<Shift> shifts;
  RegressionDataset dataset;
  PosteriorDraws draws;
  double spearman = 0.0;
  bool ready = false;
};

RecoveryState g_recovery;

// ---------------------------------------------------------------- criteria

Check c1_pseudo_counts() {
  Check c;
  GridAxes axes;
  SmoothingConfig cfg;
  c.require(pseudo_counts(600, 0, axes, cfg) == std::make_pair(175.0, 175.0),
            "(600,0) != (175,175)");
  c.require(pseudo_counts(600, 30, axes, cfg) == std::make_pair(350.0, 0.0),
            "(600,30) != (350,0)");
  c.require(pseudo_counts(600, 21, axes, cfg) == std::make_pair(280.0, 70.0),
            "(600,21) != (280,70)");
  for (int t = cfg.h_t; t <= axes.t_max() - cfg.h_t && c.ok; ++t) {
    for (int l = -(axes.lead_max - cfg.h_l); l <= axes.lead_max - cfg.h_l; ++l) {
      auto [alpha, beta] = pseudo_counts(t, l, axes, cfg);
      if (alpha + beta != 350.0) {
        c.require(false, "alpha+beta != 350 at T=" + std::to_string(t) + " L=" + std::to_string(l));
        break;
      }
    }
  }
  return c;
}

Check c2_estimator_exactness() {
  Check c;
  Rng rng(2024);
  for (int rep = 0; rep < 100000 && c.ok; ++rep) {
    double N = std::floor(rng.uniform() * 50000.0);
    double n = std::floor(rng.uniform() * (N + 1.0));
    double alpha = std::floor(rng.uniform() * 351.0);
    double beta = std::floor(rng.uniform() * 351.0);
    if (alpha + beta == 0.0) alpha = 1.0;
    auto [phat, psd] = estimate_cell(n, N, alpha, beta);
    long double a = static_cast<long double>(n) + static_cast<long double>(alpha);
    long double b = static_cast<long double>(N) - static_cast<long double>(n) +
                    static_cast<long double>(beta);
    long double tot = a + b;
    long double want_mean = a / tot;
    long double want_sd = sqrtl(a * b / (tot * tot * (tot + 1.0L)));
    c.require(std::abs(phat - static_cast<double>(want_mean)) <= 1e-12,
              "posterior mean off at rep " + std::to_string(rep));
    c.require(std::abs(psd - static_cast<double>(want_sd)) <= 1e-12,
              "posterior sd off at rep " + std::to_string(rep));
  }
  auto [phat, psd] = estimate_cell(0, 0, 175, 175);
  c.require(phat == 0.5, "prior-only mean != 0.5");
  c.require(std::abs(psd - 0.026687) < 1e-6, "prior-only sd != 0.026687");
  c.require(psd <= 0.035, "prior-only sd exceeds 0.035");
  return c;
}

Check c3_y3_at_zero() {
  Check c;
  Shift s;
  s.wp_start = 0.5;
  s.wp_end = 0.5;
  s.y = 0.0;
  auto v = transform_response({s}, ResponseTag::y3);
  c.require(std::abs(v.values[0] - 0.62246) <= 1e-4,
            "y3(0) = " + std::to_string(v.values[0]));
  return c;
}

Check c4_quadrature_oracle() {
  Check c;
  Rng rng(42);
  const int n = 30;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = rng.normal();
    y[static_cast<std::size_t>(i)] = 0.4 + 1.2 * x[static_cast<std::size_t>(i)] + 0.5 * rng.normal();
  }
  auto oracle = testutil::blasso_quadrature_p1(x, y, 4.0);

  RegressionDataset data;
  data.n_players = 1;
  data.col_names = {player_col_name("X")};
  data.player_cols["X"] = 0;
  for (int i = 0; i < n; ++i) {
    DatasetRow row;
    row.y = y[static_cast<std::size_t>(i)];
    row.entries.emplace_back(0, x[static_cast<std::size_t>(i)]);
    data.rows.push_back(std::move(row));
  }
  SamplerConfig cfg;
  cfg.burn_in = 2000;
  cfg.thin = 5;
  cfg.n_keep = 8000;
  cfg.seed = 19;
  cfg.fixed_lambda2 = 4.0;
  PosteriorDraws draws = gibbs_fit(data, cfg);
  auto column = draws.coef_column(0);
  double m = mean(column);
  double sd = sample_sd(column);
  std::ostringstream os;
  os << "sampler mean " << m << " vs " << oracle.mean << ", sd " << sd << " vs " << oracle.sd;
  c.detail = os.str();
  bool mean_ok = std::abs(m - oracle.mean) <= std::max(0.02 * std::abs(oracle.mean), 0.005);
  bool sd_ok = std::abs(sd - oracle.sd) <= std::max(0.02 * oracle.sd, 0.005);
  if (!(mean_ok && sd_ok)) {
    c.ok = false;
  }
  return c;
}

Check c5_conjugacy_suite() {
  Check c;
  const int n = 40, n_draws = 10000;
  Rng data_rng(314);
  std::vector<double> x(n), y(n);
  // First entries positive so the canonical form is the identity mapping.
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = (i == 0) ? 1.0 : data_rng.normal();
    y[static_cast<std::size_t>(i)] =
        (i == 0) ? 0.8 : (0.4 * x[static_cast<std::size_t>(i)] + 0.3 * data_rng.normal());
  }
  RegressionDataset data;
  data.n_players = 1;
  data.col_names = {player_col_name("X")};
  data.player_cols["X"] = 0;
  for (int i = 0; i < n; ++i) {
    DatasetRow row;
    row.y = y[static_cast<std::size_t>(i)];
    row.entries.emplace_back(0, x[static_cast<std::size_t>(i)]);
    data.rows.push_back(std::move(row));
  }
  SamplerConfig cfg;
  cfg.r = 2.0;
  cfg.delta = 0.1;
  GibbsSampler sampler(data, cfg);

  const double s2_fix = 0.7, sigma2_fix = 0.09, lambda2_fix = 2.5, beta_fix = 0.25;
  auto freeze = [&]() {
    sampler.state().beta = {beta_fix};
    sampler.state().s2 = {s2_fix};
    sampler.state().sigma2 = sigma2_fix;
    sampler.state().lambda2 = lambda2_fix;
  };

  // Coefficient conditional: normal with precision (X'X + 1/s2)/sigma2.
  {
    freeze();
    Rng rng(1001);
    std::vector<double> draws(n_draws);
    double A = sampler.xtx()(0, 0) + 1.0 / s2_fix;
    double m = sampler.xty()[0] / A;
    double sd = std::sqrt(sigma2_fix / A);
    for (auto& d : draws) {
      freeze();
      sampler.sample_coefficients(rng);
      d = sampler.state().beta[0];
    }
    double p = testutil::ks_pvalue(draws, [&](double v) { return testutil::normal_cdf(v, m, sd); });
    c.require(p > 0.01, "coefficient conditional KS p = " + std::to_string(p));
  }
  // Intercept conditional: normal around the response mean.
  {
    freeze();
    Rng rng(1002);
    std::vector<double> draws(n_draws);
    for (auto& d : draws) {
      sampler.sample_intercept(rng);
      d = sampler.state().intercept;
    }
    double sd = std::sqrt(sigma2_fix / n);
    double p = testutil::ks_pvalue(
        draws, [&](double v) { return testutil::normal_cdf(v, sampler.y_mean(), sd); });
    c.require(p > 0.01, "intercept conditional KS p = " + std::to_string(p));
  }
  // sigma^2 conditional: inverse gamma.
  {
    freeze();
    Rng rng(1003);
    double rss = sampler.residual_ss();
    double shape = 0.5 * (n - 1 + 1);
    double rate = 0.5 * (rss + beta_fix * beta_fix / s2_fix);
    std::vector<double> draws(n_draws);
    for (auto& d : draws) {
      freeze();
      sampler.sample_sigma2(rng);
      d = sampler.state().sigma2;
    }
    double p = testutil::ks_pvalue(
        draws, [&](double v) { return testutil::inv_gamma_cdf(v, shape, rate); });
    c.require(p > 0.01, "sigma2 conditional KS p = " + std::to_string(p));
  }
  // Latent scale conditional: 1/s2 is inverse-Gaussian.
  {
    freeze();
    Rng rng(1004);
    double ig_mean = std::sqrt(lambda2_fix * sigma2_fix / (beta_fix * beta_fix));
    std::vector<double> draws(n_draws);
    for (auto& d : draws) {
      freeze();
      sampler.sample_scales(rng);
      d = 1.0 / sampler.state().s2[0];
    }
    double p = testutil::ks_pvalue(draws, [&](double v) {
      return testutil::inv_gaussian_cdf(v, ig_mean, lambda2_fix);
    });
    c.require(p > 0.01, "scale conditional KS p = " + std::to_string(p));
  }
  // lambda^2 conditional: gamma(p + r, delta + sum s2/2).
  {
    freeze();
    Rng rng(1005);
    double shape = 1.0 + cfg.r;
    double rate = cfg.delta + 0.5 * s2_fix;
    std::vector<double> draws(n_draws);
    for (auto& d : draws) {
      freeze();
      sampler.sample_lambda2(rng);
      d = sampler.state().lambda2;
    }
    double p = testutil::ks_pvalue(
        draws, [&](double v) { return testutil::gamma_cdf(v, shape, rate); });
    c.require(p > 0.01, "lambda2 conditional KS p = " + std::to_string(p));
  }
  // Raw inverse-Gaussian draws against the closed-form CDF.
  {
    Rng rng(1006);
    std::vector<double> draws(n_draws);
    for (auto& d : draws) d = rng.inv_gaussian(1.0, 1.0);
    double p = testutil::ks_pvalue(draws, [](double v) {
      return testutil::inv_gaussian_cdf(v, 1.0, 1.0);
    });
    c.require(p > 0.01, "inverse-gaussian KS p = " + std::to_string(p));
  }
  return c;
}

Check c6_recovery_study() {
  Check c;
  SimConfig cfg;
  cfg.n_teams = 4;
  cfg.roster_size = 10;
  cfg.n_games = 300;
  cfg.theta_magnitude = 0.01;
  cfg.tau_magnitude = 0.002;
  cfg.mu_true = 0.002;
  cfg.sigma_true = 0.05;
  cfg.seed = 4242;
  g_recovery.sim = generate_season(cfg);

  CountGrid counts = accumulate_counts(g_recovery.sim.logs);
  g_recovery.grid = build_grid(counts);
  g_recovery.shifts = segment_shifts(g_recovery.sim.logs);
  annotate_shifts(g_recovery.shifts, g_recovery.grid);
  g_recovery.dataset = build_dataset(g_recovery.shifts);

  SamplerConfig scfg;
  scfg.burn_in = 2000;
  scfg.thin = 10;
  scfg.n_keep = 1000;
  scfg.seed = 99;
  g_recovery.draws = gibbs_fit(g_recovery.dataset, scfg);
  g_recovery.ready = true;

  // Spearman correlation between the true and estimated player effects.
  std::vector<double> truth, estimate;
  for (const auto& name : g_recovery.draws.coef_names) {
    if (name.rfind("theta:", 0) != 0) continue;
    truth.push_back(g_recovery.sim.truth.coefficients.at(name));
    estimate.push_back(mean(g_recovery.draws.coef_column(g_recovery.draws.col_of(name))));
  }
  g_recovery.spearman = testutil::spearman(truth, estimate);
  {
    std::ostringstream os;
    os << "spearman " << g_recovery.spearman << " over " << truth.size() << " players";
    c.detail = os.str();
  }
  c.require(truth.size() == 40, "expected 40 player coefficients");
  c.require(g_recovery.spearman >= 0.6, "spearman below 0.6: " + std::to_string(g_recovery.spearman));

  // Determinism: an identical run reproduces the draws bitwise.
  {
    PosteriorDraws again = gibbs_fit(g_recovery.dataset, scfg);
    bool equal = again.n_draws() == g_recovery.draws.n_draws();
    for (int s = 0; equal && s < again.n_draws(); ++s) {
      if (again.mu[static_cast<std::size_t>(s)] != g_recovery.draws.mu[static_cast<std::size_t>(s)] ||
          again.sigma2[static_cast<std::size_t>(s)] !=
              g_recovery.draws.sigma2[static_cast<std::size_t>(s)]) {
        equal = false;
      }
      for (int j = 0; equal && j < again.n_coefs(); ++j) {
        if (again.coef(s, j) != g_recovery.draws.coef(s, j)) equal = false;
      }
    }
    c.require(equal, "same-seed rerun differed");
  }

  // Sign equivariance: negating the responses negates every coefficient
  // draw exactly under the same seed (a smaller refit keeps this quick).
  {
    SamplerConfig small = scfg;
    small.burn_in = 200;
    small.thin = 2;
    small.n_keep = 100;
    RegressionDataset flipped = g_recovery.dataset;
    for (auto& row : flipped.rows) row.y = -row.y;
    PosteriorDraws a = gibbs_fit(g_recovery.dataset, small);
    PosteriorDraws b = gibbs_fit(flipped, small);
    bool negated = true;
    for (int s = 0; negated && s < a.n_draws(); ++s) {
      for (int j = 0; negated && j < a.n_coefs(); ++j) {
        if (b.coef(s, j) != -a.coef(s, j)) negated = false;
      }
      if (b.mu[static_cast<std::size_t>(s)] != -a.mu[static_cast<std::size_t>(s)]) negated = false;
    }
    c.require(negated, "response negation did not negate the draws exactly");
  }
  return c;
}

Check c7_null_calibration() {
  Check c;
  SimConfig cfg;
  cfg.n_teams = 30;
  cfg.roster_size = 14;
  cfg.n_games = 250;
  cfg.theta_magnitude = 0.0;
  cfg.tau_magnitude = 0.0;
  cfg.mu_true = 0.0;
  cfg.seed = 777;
  SimResult sim = generate_season(cfg);
  CountGrid counts = accumulate_counts(sim.logs);
  WinProbGrid grid = build_grid(counts);
  auto shifts = segment_shifts(sim.logs);
  annotate_shifts(shifts, grid);
  RegressionDataset data = build_dataset(shifts);

  SamplerConfig scfg;
  scfg.burn_in = 300;
  scfg.thin = 2;
  scfg.n_keep = 400;
  scfg.seed = 31337;
  PosteriorDraws draws = gibbs_fit(data, scfg);

  int total = draws.n_coefs();
  int excluded = 0;
  for (int j = 0; j < total; ++j) {
    auto column = draws.coef_column(j);
    std::sort(column.begin(), column.end());
    double lo = quantile_sorted(column, 0.025);
    double hi = quantile_sorted(column, 0.975);
    if (lo > 0.0 || hi < 0.0) ++excluded;
  }
  std::ostringstream os;
  os << excluded << "/" << total << " intervals exclude zero";
  c.detail = os.str();
  c.require(total >= 400, "fewer than 400 coefficients: " + std::to_string(total));
  c.require(excluded <= static_cast<int>(0.07 * total), "more than 7% exclude zero");
  return c;
}

Check c8_rank_sum_identity() {
  Check c;
  c.require(g_recovery.ready, "recovery pipeline unavailable");
  if (!c.ok) return c;
  auto rosters = rosters_from_shifts(g_recovery.shifts);
  for (const auto& [team, players] : rosters) {
    std::vector<std::string> roster;
    for (const auto& p : players) roster.push_back(player_col_name(p));
    TeamRanking r = impact_ranking(g_recovery.draws, team, roster);
    double sum = 0;
    for (const auto& e : r.entries) sum += e.avg_rank;
    double k = static_cast<double>(roster.size());
    if (std::abs(sum - k * (k + 1.0) / 2.0) > 1e-9) {
      c.require(false, "rank sum off for team " + team);
    }
  }
  // Crafted rosters with random draws as well.
  Rng rng(55);
  for (int k : {2, 7, 15}) {
    PosteriorDraws draws;
    std::vector<std::string> roster;
    for (int j = 0; j < k; ++j) {
      draws.coef_names.push_back(player_col_name("P" + std::to_string(j)));
      roster.push_back(draws.coef_names.back());
    }
    draws.n_players = k;
    draws.mu.assign(200, 0.0);
    draws.sigma2.assign(200, 1.0);
    draws.coef = Matrix(200, k);
    for (int s = 0; s < 200; ++s) {
      for (int j = 0; j < k; ++j) draws.coef(s, j) = rng.normal();
    }
    TeamRanking r = impact_ranking(draws, "T", roster);
    double sum = 0;
    for (const auto& e : r.entries) sum += e.avg_rank;
    if (std::abs(sum - k * (k + 1.0) / 2.0) > 1e-9) {
      c.require(false, "rank sum off for crafted roster of " + std::to_string(k));
    }
  }
  return c;
}

Check c9_matchup_cancellation() {
  Check c;
  c.require(g_recovery.ready, "recovery pipeline unavailable");
  if (!c.ok) return c;
  const auto& draws = g_recovery.draws;
  std::array<std::string, 5> lineup;
  int got = 0;
  for (const auto& name : draws.coef_names) {
    if (name.rfind("theta:T01_", 0) == 0 && got < 5) {
      lineup[static_cast<std::size_t>(got++)] = name;
    }
  }
  c.require(got == 5, "could not assemble a lineup");
  if (!c.ok) return c;
  Rng rng(8080);
  MatchupResult r = matchup_predict(draws, lineup, "tau:T01", lineup, "tau:T01", rng);
  double mu_bar = mean(draws.mu);
  double se = std::sqrt(mean(draws.sigma2) / draws.n_draws());
  std::ostringstream os;
  os << "predictive mean " << r.mean << " vs mu mean " << mu_bar << " (se " << se << ")";
  c.detail = os.str();
  c.require(std::abs(r.mean - mu_bar) <= 3.0 * se, "cancellation outside 3 mc standard errors");
  return c;
}

Check c10_reweighting_fixed_point() {
  Check c;
  c.require(g_recovery.ready, "recovery pipeline unavailable");
  if (!c.ok) return c;
  auto edges = default_bin_edges(10);
  for (double target : {1.0, 0.03, 0.12}) {
    ReweightResult rw = reweight_dataset(g_recovery.dataset, edges, target);
    std::vector<double> ys, wps;
    for (const auto& row : rw.dataset.rows) {
      ys.push_back(row.y);
      wps.push_back(row.start_wp);
    }
    BinnedSd after = binned_sd(ys, wps, edges);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      if (after.counts[b] < 2) continue;
      if (std::abs(after.sds[b] - target) > 1e-9) {
        c.require(false, "bin sd " + std::to_string(after.sds[b]) + " != target " +
                             std::to_string(target));
      }
    }
  }
  return c;
}

Check c11_telescoping() {
  Check c;
  c.require(g_recovery.ready, "recovery pipeline unavailable");
  if (!c.ok) return c;
  std::size_t i = 0;
  for (const auto& log : g_recovery.sim.logs) {
    double sum = 0.0;
    double first_wp = 0.0, last_wp = 0.0;
    bool first = true;
    while (i < g_recovery.shifts.size() && g_recovery.shifts[i].game_id == log.game_id) {
      if (first) {
        first_wp = g_recovery.shifts[i].wp_start;
        first = false;
      }
      sum += g_recovery.shifts[i].y;
      last_wp = g_recovery.shifts[i].wp_end;
      ++i;
    }
    if (std::abs(sum - (last_wp - first_wp)) > 1e-12) {
      c.require(false, "telescoping broke in game " + log.game_id);
    }
  }
  return c;
}

Check c12_permutation_sanity() {
  Check c;
  Rng rng(616);
  const int n_perm = 10000;
  {
    std::vector<double> x(50);
    for (auto& v : x) v = rng.normal();
    Rng prng(617);
    PermTestResult r = perm_test_corr(x, x, n_perm, prng);
    std::ostringstream os;
    os << "perfect-correlation p = " << r.p_value;
    c.detail = os.str();
    c.require(r.p_value <= 1.0 / n_perm + 1e-12, "perfectly correlated p not minimal");
  }
  {
    double sum_p = 0.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
      std::vector<double> x(50), y(50);
      for (auto& v : x) v = rng.normal();
      for (auto& v : y) v = rng.normal();
      sum_p += perm_test_corr(x, y, n_perm, rng).p_value;
    }
    double avg = sum_p / reps;
    c.detail += ", independent mean p = " + std::to_string(avg);
    c.require(avg >= 0.4 && avg <= 0.6, "independent mean p outside [0.4, 0.6]");
  }
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "pseudo-count window totals (350 interior; 175/175, 350/0, 280/70)", c1_pseudo_counts},
      {2, "beta posterior estimator exact to 1e-12; prior-only sd 0.026687 <= 0.035",
       c2_estimator_exactness},
      {3, "y3(0) = 0.62246 +/- 1e-4", c3_y3_at_zero},
      {4, "gibbs posterior matches 2-d quadrature oracle (p=1, n=30)", c4_quadrature_oracle},
      {5, "conjugacy suite: every full conditional passes ks at p > 0.01", c5_conjugacy_suite},
      {6, "recovery study: spearman >= 0.6, determinism, sign equivariance", c6_recovery_study},
      {7, "null calibration: <= 7% of 95% intervals exclude zero", c7_null_calibration},
      {8, "impact-ranking rank sums equal k(k+1)/2", c8_rank_sum_identity},
      {9, "identical-lineup matchup cancels to the mu mean within 3 se", c9_matchup_cancellation},
      {10, "reweighting fixed point at targets 1 / 0.03 / 0.12 within 1e-9",
       c10_reweighting_fixed_point},
      {11, "per-game telescoping of y to 1e-12", c11_telescoping},
      {12, "permutation test: minimal p when perfect, mean p in [0.4, 0.6] when independent",
       c12_permutation_sanity},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    std::printf("[%s] %2d. %s (%lld ms)%s%s\n", result.ok ? "PASS" : "FAIL", criterion.id,
                criterion.name, static_cast<long long>(elapsed),
                result.detail.empty() ? "" : " -- ", result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
