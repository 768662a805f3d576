#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "winshift/blasso.hpp"
#include "winshift/diagnostics.hpp"
#include "winshift/errors.hpp"
#include "winshift/rng.hpp"

using namespace winshift;

namespace {

Shift annotated_shift(double wp_start, double wp_end) {
  Shift s;
  s.game_id = "G";
  s.start_sec = 0;
  s.end_sec = 60;
  s.home_team = "H";
  s.away_team = "A";
  s.home_players = {"h1", "h2", "h3", "h4", "h5"};
  s.away_players = {"a1", "a2", "a3", "a4", "a5"};
  s.wp_start = wp_start;
  s.wp_end = wp_end;
  s.y = wp_end - wp_start;
  return s;
}

}  // namespace

TEST_CASE("autocorrelation") {
  SUBCASE("alternating series has lag-1 acf near minus one") {
    std::vector<double> series(1000);
    for (std::size_t i = 0; i < series.size(); ++i) series[i] = (i % 2 == 0) ? 1.0 : -1.0;
    auto r = acf(series, 2);
    CHECK(std::abs(r[0] + 1.0) < 0.01);
  }
  SUBCASE("iid noise has small lag-1 acf") {
    Rng rng(5);
    std::vector<double> series(10000);
    for (auto& v : series) v = rng.normal();
    auto r = acf(series, 5);
    for (double v : r) CHECK(std::abs(v) < 0.05);
  }
  SUBCASE("values stay within [-1, 1]") {
    Rng rng(6);
    std::vector<double> series(500);
    for (std::size_t i = 0; i < series.size(); ++i) {
      series[i] = std::sin(0.3 * static_cast<double>(i)) + 0.1 * rng.normal();
    }
    for (double v : acf(series, 30)) {
      CHECK(v <= 1.0);
      CHECK(v >= -1.0);
    }
  }
  SUBCASE("constant series is an error") {
    std::vector<double> series(100, 2.5);
    CHECK_THROWS_AS(acf(series, 3), ValidationError);
  }
  SUBCASE("series must be longer than the lag window") {
    std::vector<double> series = {1, 2, 3};
    CHECK_THROWS_AS(acf(series, 3), ValidationError);
  }
}

TEST_CASE("response transformations") {
  SUBCASE("y3 at zero change") {
    std::vector<Shift> shifts = {annotated_shift(0.5, 0.5)};
    auto v = transform_response(shifts, ResponseTag::y3);
    CHECK(v.values[0] == doctest::Approx(0.62246).epsilon(1e-4));
  }
  SUBCASE("y3 is strictly increasing in y1 and hits 0.5 at y1 = -1") {
    std::vector<Shift> shifts;
    for (double y = -1.0; y <= 1.0; y += 0.05) {
      shifts.push_back(annotated_shift(0.5, 0.5 + y / 2.0));
      shifts.back().y = y;
    }
    auto v = transform_response(shifts, ResponseTag::y3);
    for (std::size_t i = 1; i < v.values.size(); ++i) CHECK(v.values[i] > v.values[i - 1]);
    std::vector<Shift> at_floor = {annotated_shift(1.0, 0.0)};
    auto lo = transform_response(at_floor, ResponseTag::y3);
    CHECK(lo.values[0] == 0.5);
  }
  SUBCASE("log-odds change") {
    std::vector<Shift> shifts = {annotated_shift(0.22, 0.98)};
    auto v = transform_response(shifts, ResponseTag::y2);
    CHECK(v.values[0] == doctest::Approx(5.1575).epsilon(1e-3));
    std::vector<Shift> flat = {annotated_shift(0.37, 0.37)};
    CHECK(transform_response(flat, ResponseTag::y2).values[0] == 0.0);
  }
  SUBCASE("y2 clamps probabilities at the grid extremes") {
    std::vector<Shift> shifts = {annotated_shift(0.5, 1.0)};
    auto v = transform_response(shifts, ResponseTag::y2);
    CHECK(std::isfinite(v.values[0]));
    CHECK(v.values[0] == doctest::Approx(std::log((1.0 - 1e-6) / 1e-6)).epsilon(1e-9));
  }
}

TEST_CASE("binned standard deviations") {
  SUBCASE("two-point bin") {
    std::vector<double> responses = {-0.1, 0.1};
    std::vector<double> wps = {0.25, 0.27};
    auto out = binned_sd(responses, wps, default_bin_edges(10));
    CHECK(out.counts[2] == 2);
    CHECK(out.sds[2] == doctest::Approx(0.1414).epsilon(1e-3));
  }
  SUBCASE("equal responses give zero sd") {
    std::vector<double> responses = {0.2, 0.2, 0.2};
    std::vector<double> wps = {0.11, 0.12, 0.13};
    auto out = binned_sd(responses, wps, default_bin_edges(10));
    CHECK(out.sds[1] < 1e-12);
  }
  SUBCASE("hand-computed two-bin fixture") {
    std::vector<double> responses = {1.0, 3.0, -2.0, 2.0, 0.0};
    std::vector<double> wps = {0.1, 0.3, 0.6, 0.7, 0.65};
    std::vector<double> edges = {0.0, 0.5, 1.0};
    auto out = binned_sd(responses, wps, edges);
    CHECK(out.counts[0] == 2);
    CHECK(out.counts[1] == 3);
    CHECK(out.sds[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(out.sds[1] == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("singleton bins are flagged") {
    std::vector<double> responses = {1.0, 2.0, 3.0};
    std::vector<double> wps = {0.05, 0.15, 0.16};
    auto out = binned_sd(responses, wps, default_bin_edges(10));
    REQUIRE(out.sparse_bins.size() == 1);
    CHECK(out.sparse_bins[0] == 0);
    CHECK(std::isnan(out.sds[0]));
  }
  SUBCASE("out-of-range win probability is an error") {
    std::vector<double> responses = {1.0};
    std::vector<double> wps = {1.5};
    CHECK_THROWS_AS(binned_sd(responses, wps, default_bin_edges(10)), ValidationError);
  }
}

namespace {

RegressionDataset reweight_fixture(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Shift> shifts;
  for (int i = 0; i < n; ++i) {
    double wp = rng.uniform();
    double scale = 0.02 + 0.1 * wp * (1.0 - wp);  // heteroscedastic
    Shift s = annotated_shift(wp, wp);
    s.y = scale * rng.normal();
    shifts.push_back(s);
  }
  return build_dataset(shifts);
}

std::pair<std::vector<double>, std::vector<double>> dataset_responses(
    const RegressionDataset& data) {
  std::vector<double> ys, wps;
  for (const auto& row : data.rows) {
    ys.push_back(row.y);
    wps.push_back(row.start_wp);
  }
  return {ys, wps};
}

}  // namespace

TEST_CASE("reweighting drives every binned sd to the target") {
  RegressionDataset data = reweight_fixture(4000, 9);
  auto edges = default_bin_edges(10);
  for (double target : {1.0, 0.03, 0.12}) {
    ReweightResult rw = reweight_dataset(data, edges, target);
    auto [ys, wps] = dataset_responses(rw.dataset);
    auto after = binned_sd(ys, wps, edges);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      if (after.counts[b] < 2) continue;
      CHECK(std::abs(after.sds[b] - target) < 1e-9);
    }
    // Predictors scale with the response row by row.
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      REQUIRE(rw.dataset.rows[i].entries.size() == data.rows[i].entries.size());
      for (std::size_t e = 0; e < data.rows[i].entries.size(); ++e) {
        CHECK(rw.dataset.rows[i].entries[e].second ==
              doctest::Approx(data.rows[i].entries[e].second * rw.weights[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("reweighting at the current sd is the identity") {
  RegressionDataset data = reweight_fixture(500, 10);
  // One wide bin makes the current sd the target.
  std::vector<double> edges = {0.0, 1.0};
  auto [ys, wps] = dataset_responses(data);
  double current = binned_sd(ys, wps, edges).sds[0];
  ReweightResult rw = reweight_dataset(data, edges, current);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    CHECK(rw.dataset.rows[i].y == doctest::Approx(data.rows[i].y).epsilon(1e-12));
    CHECK(rw.weights[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("reweighting rejects a zero-variance bin") {
  RegressionDataset data = reweight_fixture(100, 11);
  for (auto& row : data.rows) row.y = 0.0;
  CHECK_THROWS_AS(reweight_dataset(data, default_bin_edges(2), 0.03), NumericalError);
}

TEST_CASE("residual diagnostics") {
  RegressionDataset data = reweight_fixture(50, 12);
  SUBCASE("zero draws give zero fits") {
    PosteriorDraws draws;
    draws.coef_names = data.col_names;
    draws.n_players = data.n_players;
    draws.mu = {0.0};
    draws.sigma2 = {1.0};
    draws.coef = Matrix(1, data.cols());
    ResidualSet res = residual_diagnostics(data, draws);
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      CHECK(res.fitted[i] == 0.0);
      CHECK(res.residuals[i] == data.rows[i].y);
    }
  }
  SUBCASE("opposite draws cancel to the intercept mean") {
    PosteriorDraws draws;
    draws.coef_names = data.col_names;
    draws.n_players = data.n_players;
    draws.mu = {0.01, 0.03};
    draws.sigma2 = {1.0, 1.0};
    draws.coef = Matrix(2, data.cols());
    Rng rng(13);
    for (int j = 0; j < data.cols(); ++j) {
      double v = rng.normal();
      draws.coef(0, j) = v;
      draws.coef(1, j) = -v;
    }
    ResidualSet res = residual_diagnostics(data, draws);
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      CHECK(res.fitted[i] == doctest::Approx(0.02).epsilon(1e-12));
    }
  }
  SUBCASE("three-row hand fixture") {
    RegressionDataset tiny;
    tiny.n_players = 2;
    tiny.n_teams = 0;
    tiny.col_names = {"theta:A", "theta:B"};
    tiny.player_cols = {{"A", 0}, {"B", 1}};
    for (int i = 0; i < 3; ++i) tiny.rows.push_back({});
    tiny.rows[0].entries = {{0, 1.0}};
    tiny.rows[0].y = 0.5;
    tiny.rows[1].entries = {{0, 1.0}, {1, -1.0}};
    tiny.rows[1].y = -0.25;
    tiny.rows[2].entries = {{1, 2.0}};
    tiny.rows[2].y = 1.0;
    PosteriorDraws draws;
    draws.coef_names = tiny.col_names;
    draws.n_players = 2;
    draws.mu = {0.1, 0.2};
    draws.sigma2 = {1.0, 1.0};
    draws.coef = Matrix(2, 2);
    draws.coef(0, 0) = 0.3;
    draws.coef(0, 1) = -0.1;
    draws.coef(1, 0) = 0.5;
    draws.coef(1, 1) = 0.1;
    // Posterior means: mu 0.15, A 0.4, B 0.0.
    ResidualSet res = residual_diagnostics(tiny, draws);
    CHECK(res.fitted[0] == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(res.fitted[1] == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(res.fitted[2] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(res.residuals[2] == doctest::Approx(0.85).epsilon(1e-12));
  }
}

TEST_CASE("qq data is monotone in both coordinates") {
  Rng rng(14);
  std::vector<double> residuals(500);
  for (auto& v : residuals) v = 0.1 * rng.normal() + 0.02;
  QqData qq = qq_data(residuals);
  for (std::size_t i = 1; i < qq.raw.size(); ++i) {
    CHECK(qq.normal_q[i] > qq.normal_q[i - 1]);
    CHECK(qq.raw[i] >= qq.raw[i - 1]);
    CHECK(qq.studentized[i] >= qq.studentized[i - 1]);
  }
  // Studentized residuals really are raw over the sample sd.
  double sd = sample_sd(residuals);
  CHECK(qq.studentized[10] == doctest::Approx(qq.raw[10] / sd).epsilon(1e-12));
}

TEST_CASE("scaling the response rescales the coefficient chain exactly") {
  // Uniform reweighting by a power of two keeps the posterior family and
  // maps the draws linearly; checked bitwise against the sampler.
  Rng rng(15);
  int n = 200;
  std::vector<Shift> shifts;
  for (int i = 0; i < n; ++i) {
    Shift s = annotated_shift(0.4, 0.4);
    s.y = 0.05 * rng.normal();
    // Vary the lineup so the design has more than one distinct row.
    if (i % 2 == 0) s.home_players = {"h1", "h2", "h3", "h4", "h6"};
    shifts.push_back(s);
  }
  RegressionDataset data = build_dataset(shifts);
  RegressionDataset scaled = data;
  for (auto& row : scaled.rows) row.y *= 2.0;
  SamplerConfig cfg;
  cfg.burn_in = 100;
  cfg.thin = 2;
  cfg.n_keep = 100;
  cfg.seed = 44;
  PosteriorDraws a = gibbs_fit(data, cfg);
  PosteriorDraws b = gibbs_fit(scaled, cfg);
  for (int s = 0; s < a.n_draws(); ++s) {
    for (int j = 0; j < a.n_coefs(); ++j) CHECK(b.coef(s, j) == 2.0 * a.coef(s, j));
    CHECK(b.sigma2[static_cast<std::size_t>(s)] == 4.0 * a.sigma2[static_cast<std::size_t>(s)]);
  }
}

TEST_CASE("histogram counts cover every value") {
  Rng rng(16);
  std::vector<double> values(1000);
  for (auto& v : values) v = rng.normal();
  Histogram h = histogram(values, 30);
  int total = 0;
  for (int c : h.counts) total += c;
  CHECK(total == 1000);
  CHECK(h.edges.size() == 31);
}
