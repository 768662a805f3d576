#pragma once

#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "winshift/blasso.hpp"
#include "winshift/rng.hpp"
#include "winshift/shifts.hpp"

namespace winshift {

// Posterior-based player, team and lineup metrics computed from retained
// draws. All functions are pure over immutable draws.

struct LeverageProfile {
  std::string player;
  int n_shifts = 0;
  double mean_start_wp = 0.0;      // from the player's team perspective
  double mean_duration_sec = 0.0;
};

struct ImpactSummary {
  std::string id;
  double post_mean = 0.0;
  double post_sd = 0.0;
  double impact_score = 0.0;  // post_mean / post_sd
  double frac_positive = 0.0;
};

struct RankedPlayer {
  std::string player;
  double avg_rank = 0.0;
  double p_next = -1.0;  // negative when there is no next-ranked player
};

struct TeamRanking {
  std::string team;
  std::vector<RankedPlayer> entries;
};

// Fraction of draws in which coefficient a strictly exceeds coefficient b.
double exceedance_prob(const PosteriorDraws& draws, const std::string& a, const std::string& b);

ImpactSummary impact_summary_of(std::vector<double> samples, const std::string& id);
ImpactSummary impact_score(const PosteriorDraws& draws, const std::string& coef_name);

// Ranks the roster within each draw (rank 1 = largest effect, ties broken
// by column order), averages the ranks over draws, and reports adjacent
// exceedance probabilities.
TeamRanking impact_ranking(const PosteriorDraws& draws, const std::string& team,
                           const std::vector<std::string>& roster);

std::vector<LeverageProfile> leverage_profiles(const std::vector<Shift>& shifts);

// Mahalanobis k-nearest neighbours under the sample covariance of all
// profiles, self excluded, ascending distance.
std::vector<std::pair<std::string, double>> similar_players(
    const std::vector<LeverageProfile>& profiles, const std::string& player, int k);

double mahalanobis_distance(const std::vector<LeverageProfile>& profiles, const std::string& a,
                            const std::string& b);

struct LineupEffect {
  std::vector<double> per_draw;
  ImpactSummary summary;
};

LineupEffect lineup_effect(const PosteriorDraws& draws, const std::array<std::string, 5>& players);

struct MatchupResult {
  std::vector<double> samples;  // one per retained draw
  double mean = 0.0;
  double p_positive = 0.0;
  double q025 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q975 = 0.0;
};

// Posterior predictive change in home win probability for a shift of the
// given matchup: mu + sum(home theta) - sum(away theta) + tau_H - tau_A +
// sigma*z per draw, z standard normal.
MatchupResult matchup_predict(const PosteriorDraws& draws,
                              const std::array<std::string, 5>& home_players,
                              const std::string& home_team,
                              const std::array<std::string, 5>& away_players,
                              const std::string& away_team, Rng& rng);

struct PermTestResult {
  double corr = 0.0;
  double p_value = 0.0;
  int n_perm = 0;
};

// Two-sided permutation test of the Pearson correlation: the p-value is the
// share of permutations whose |corr| reaches the observed |corr|.
PermTestResult perm_test_corr(std::span<const double> x, std::span<const double> y, int n_perm,
                              Rng& rng);

struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
};

// Gaussian kernel density with Silverman bandwidth; plotting output only.
KdeCurve kde_curve(std::span<const double> samples, int n_grid = 512);

// Players observed in any shift for each team.
std::map<std::string, std::set<std::string>> rosters_from_shifts(const std::vector<Shift>& shifts);

}  // namespace winshift
