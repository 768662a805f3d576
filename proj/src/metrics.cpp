#include "winshift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "winshift/errors.hpp"
#include "winshift/stats.hpp"

namespace winshift {

double exceedance_prob(const PosteriorDraws& draws, const std::string& a, const std::string& b) {
  int ca = draws.col_of(a);
  int cb = draws.col_of(b);
  int count = 0;
  for (int s = 0; s < draws.n_draws(); ++s) {
    if (draws.coef(s, ca) > draws.coef(s, cb)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(draws.n_draws());
}

ImpactSummary impact_summary_of(std::vector<double> samples, const std::string& id) {
  if (samples.size() < 2) throw ValidationError("impact summary needs at least two draws");
  ImpactSummary out;
  out.id = id;
  out.post_mean = mean(samples);
  out.post_sd = sample_sd(samples);
  if (!(out.post_sd > 0.0)) {
    throw NumericalError("impact score undefined for zero-variance draws of '" + id + "'");
  }
  out.impact_score = out.post_mean / out.post_sd;
  int pos = 0;
  for (double v : samples) {
    if (v > 0.0) ++pos;
  }
  out.frac_positive = static_cast<double>(pos) / static_cast<double>(samples.size());
  return out;
}

ImpactSummary impact_score(const PosteriorDraws& draws, const std::string& coef_name) {
  return impact_summary_of(draws.coef_column(draws.col_of(coef_name)), coef_name);
}

TeamRanking impact_ranking(const PosteriorDraws& draws, const std::string& team,
                           const std::vector<std::string>& roster) {
  std::size_t k = roster.size();
  if (k < 2) throw ValidationError("impact_ranking: roster must have at least two players");

  std::vector<int> cols(k);
  for (std::size_t i = 0; i < k; ++i) cols[i] = draws.col_of(roster[i]);

  std::vector<double> rank_sum(k, 0.0);
  std::vector<std::size_t> order(k);
  for (int s = 0; s < draws.n_draws(); ++s) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return draws.coef(s, cols[a]) > draws.coef(s, cols[b]);
    });
    for (std::size_t pos = 0; pos < k; ++pos) {
      rank_sum[order[pos]] += static_cast<double>(pos + 1);
    }
  }

  TeamRanking ranking;
  ranking.team = team;
  ranking.entries.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    ranking.entries[i].player = roster[i];
    ranking.entries[i].avg_rank = rank_sum[i] / static_cast<double>(draws.n_draws());
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedPlayer& a, const RankedPlayer& b) {
                     return a.avg_rank < b.avg_rank;
                   });
  for (std::size_t i = 0; i + 1 < k; ++i) {
    ranking.entries[i].p_next =
        exceedance_prob(draws, ranking.entries[i].player, ranking.entries[i + 1].player);
  }
  return ranking;
}

std::vector<LeverageProfile> leverage_profiles(const std::vector<Shift>& shifts) {
  if (shifts.empty()) throw ValidationError("leverage_profiles: no shifts");
  struct Acc {
    int n = 0;
    double wp = 0.0;
    double dur = 0.0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& s : shifts) {
    if (!std::isfinite(s.wp_start)) {
      throw ValidationError("leverage_profiles: shifts missing win-probability annotation");
    }
    for (const auto& p : s.home_players) {
      auto& a = acc[p];
      ++a.n;
      a.wp += s.wp_start;
      a.dur += s.duration();
    }
    for (const auto& p : s.away_players) {
      auto& a = acc[p];
      ++a.n;
      a.wp += 1.0 - s.wp_start;  // team perspective
      a.dur += s.duration();
    }
  }
  std::vector<LeverageProfile> profiles;
  profiles.reserve(acc.size());
  for (const auto& [player, a] : acc) {
    profiles.push_back({player, a.n, a.wp / a.n, a.dur / a.n});
  }
  return profiles;
}

namespace {

// Cholesky of the 3x3 sample covariance of the profile features, with a
// diagonal bump retry when near-singular.
Matrix profile_cov_chol(const std::vector<LeverageProfile>& profiles) {
  std::size_t m = profiles.size();
  if (m < 3) throw ValidationError("similar_players: need at least three profiles");
  double mu[3] = {0, 0, 0};
  for (const auto& p : profiles) {
    mu[0] += p.n_shifts;
    mu[1] += p.mean_start_wp;
    mu[2] += p.mean_duration_sec;
  }
  for (double& v : mu) v /= static_cast<double>(m);
  Matrix cov(3, 3);
  for (const auto& p : profiles) {
    double d[3] = {p.n_shifts - mu[0], p.mean_start_wp - mu[1], p.mean_duration_sec - mu[2]};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) cov(i, j) += d[i] * d[j];
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) cov(i, j) /= static_cast<double>(m - 1);
  }
  try {
    return cholesky(cov);
  } catch (const NumericalError&) {
    double bump = 1e-8 * (cov(0, 0) + cov(1, 1) + cov(2, 2)) / 3.0;
    for (int i = 0; i < 3; ++i) cov(i, i) += bump;
    try {
      return cholesky(cov);
    } catch (const NumericalError&) {
      throw ValidationError("similar_players: singular profile covariance after regularization");
    }
  }
}

double mahalanobis_from_chol(const Matrix& L, const LeverageProfile& a,
                             const LeverageProfile& b) {
  std::vector<double> d = {static_cast<double>(a.n_shifts - b.n_shifts),
                           a.mean_start_wp - b.mean_start_wp,
                           a.mean_duration_sec - b.mean_duration_sec};
  // d^T Cov^-1 d via one triangular solve.
  std::vector<double> w(3);
  for (int i = 0; i < 3; ++i) {
    double s = d[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= L(i, k) * w[static_cast<std::size_t>(k)];
    w[static_cast<std::size_t>(i)] = s / L(i, i);
  }
  double q = 0;
  for (double v : w) q += v * v;
  return std::sqrt(q);
}

const LeverageProfile& find_profile(const std::vector<LeverageProfile>& profiles,
                                    const std::string& player) {
  for (const auto& p : profiles) {
    if (p.player == player) return p;
  }
  throw ValidationError("no leverage profile for player '" + player + "'");
}

}  // namespace

std::vector<std::pair<std::string, double>> similar_players(
    const std::vector<LeverageProfile>& profiles, const std::string& player, int k) {
  Matrix L = profile_cov_chol(profiles);
  const auto& self = find_profile(profiles, player);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) {
    if (p.player == player) continue;
    out.emplace_back(p.player, mahalanobis_from_chol(L, self, p));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;
  });
  if (k >= 0 && static_cast<std::size_t>(k) < out.size()) out.resize(static_cast<std::size_t>(k));
  return out;
}

double mahalanobis_distance(const std::vector<LeverageProfile>& profiles, const std::string& a,
                            const std::string& b) {
  Matrix L = profile_cov_chol(profiles);
  return mahalanobis_from_chol(L, find_profile(profiles, a), find_profile(profiles, b));
}

LineupEffect lineup_effect(const PosteriorDraws& draws, const std::array<std::string, 5>& players) {
  for (std::size_t i = 0; i < players.size(); ++i) {
    for (std::size_t j = i + 1; j < players.size(); ++j) {
      if (players[i] == players[j]) {
        throw ValidationError("lineup_effect: duplicate player '" + players[i] + "'");
      }
    }
  }
  std::array<int, 5> cols{};
  for (std::size_t i = 0; i < 5; ++i) cols[i] = draws.col_of(players[i]);
  LineupEffect out;
  out.per_draw.resize(static_cast<std::size_t>(draws.n_draws()));
  for (int s = 0; s < draws.n_draws(); ++s) {
    double sum = 0;
    for (int c : cols) sum += draws.coef(s, c);
    out.per_draw[static_cast<std::size_t>(s)] = sum;
  }
  std::string label = players[0];
  for (std::size_t i = 1; i < 5; ++i) label += "+" + players[i];
  out.summary = impact_summary_of(out.per_draw, label);
  return out;
}

MatchupResult matchup_predict(const PosteriorDraws& draws,
                              const std::array<std::string, 5>& home_players,
                              const std::string& home_team,
                              const std::array<std::string, 5>& away_players,
                              const std::string& away_team, Rng& rng) {
  std::array<int, 5> home_cols{}, away_cols{};
  for (std::size_t i = 0; i < 5; ++i) home_cols[i] = draws.col_of(home_players[i]);
  for (std::size_t i = 0; i < 5; ++i) away_cols[i] = draws.col_of(away_players[i]);
  int th = draws.col_of(home_team);
  int ta = draws.col_of(away_team);

  MatchupResult out;
  out.samples.resize(static_cast<std::size_t>(draws.n_draws()));
  int pos = 0;
  for (int s = 0; s < draws.n_draws(); ++s) {
    double v = draws.mu[static_cast<std::size_t>(s)];
    for (int c : home_cols) v += draws.coef(s, c);
    for (int c : away_cols) v -= draws.coef(s, c);
    v += draws.coef(s, th) - draws.coef(s, ta);
    v += std::sqrt(draws.sigma2[static_cast<std::size_t>(s)]) * rng.normal();
    out.samples[static_cast<std::size_t>(s)] = v;
    if (v > 0.0) ++pos;
  }
  out.mean = mean(out.samples);
  out.p_positive = static_cast<double>(pos) / static_cast<double>(draws.n_draws());
  std::vector<double> sorted = out.samples;
  std::sort(sorted.begin(), sorted.end());
  out.q025 = quantile_sorted(sorted, 0.025);
  out.q25 = quantile_sorted(sorted, 0.25);
  out.q50 = quantile_sorted(sorted, 0.50);
  out.q75 = quantile_sorted(sorted, 0.75);
  out.q975 = quantile_sorted(sorted, 0.975);
  return out;
}

PermTestResult perm_test_corr(std::span<const double> x, std::span<const double> y, int n_perm,
                              Rng& rng) {
  if (x.size() != y.size() || x.size() < 3) {
    throw ValidationError("perm_test_corr: need equal-length inputs with n >= 3");
  }
  if (n_perm < 1) throw ValidationError("perm_test_corr: n_perm must be positive");
  PermTestResult out;
  out.n_perm = n_perm;
  out.corr = pearson(x, y);  // throws on zero variance

  std::vector<double> perm(y.begin(), y.end());
  double threshold = std::abs(out.corr);
  int hits = 0;
  for (int rep = 0; rep < n_perm; ++rep) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i + 1)));
      std::swap(perm[i], perm[j]);
    }
    if (std::abs(pearson(x, perm)) >= threshold) ++hits;
  }
  out.p_value = static_cast<double>(hits) / static_cast<double>(n_perm);
  return out;
}

KdeCurve kde_curve(std::span<const double> samples, int n_grid) {
  if (samples.size() < 2) throw ValidationError("kde_curve: need at least two samples");
  double sd = sample_sd(samples);
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  double h = 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
  if (!(h > 0.0)) h = 1e-9;

  KdeCurve curve;
  curve.x.resize(static_cast<std::size_t>(n_grid));
  curve.density.resize(static_cast<std::size_t>(n_grid));
  double lo = sorted.front() - 3.0 * h;
  double hi = sorted.back() + 3.0 * h;
  const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * h * static_cast<double>(samples.size()));
  for (int g = 0; g < n_grid; ++g) {
    double x = lo + (hi - lo) * g / (n_grid - 1);
    double dens = 0;
    for (double s : sorted) {
      double z = (x - s) / h;
      dens += std::exp(-0.5 * z * z);
    }
    curve.x[static_cast<std::size_t>(g)] = x;
    curve.density[static_cast<std::size_t>(g)] = dens * norm;
  }
  return curve;
}

std::map<std::string, std::set<std::string>> rosters_from_shifts(const std::vector<Shift>& shifts) {
  std::map<std::string, std::set<std::string>> rosters;
  for (const auto& s : shifts) {
    for (const auto& p : s.home_players) rosters[s.home_team].insert(p);
    for (const auto& p : s.away_players) rosters[s.away_team].insert(p);
  }
  return rosters;
}

}  // namespace winshift
