#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "winshift/events.hpp"

namespace winshift {

// Synthetic season generator with known ground truth, so the whole pipeline
// (grid, dataset, sampler, metrics) can be checked end to end.
//
// Scoring is a per-second point process. With A = mu* + sum theta*(home on
// court) - sum theta*(away on court) + tau*_H - tau*_A, the per-second
// scoring probabilities are base_event_rate +/- rate_gain * A for the home
// and away side, so the point drift is linear in A with slope
// 2 * rate_gain * E[points per score]. Substitution boundaries follow a
// Poisson renewal thinned at period boundaries. Tied games play extra
// 300-second periods until decided.
struct SimConfig {
  int n_teams = 4;
  int roster_size = 10;
  int n_games = 300;
  double mu_true = 0.002;
  double theta_magnitude = 0.01;  // players alternate +/- this value
  double tau_magnitude = 0.002;   // teams alternate +/- this value
  double sigma_true = 0.05;       // recorded in the truth file
  double shifts_per_game = 31.0;
  double base_event_rate = 0.015;  // scoring events per second per team
  double rate_gain = 0.10;         // event-rate change per unit effect
  std::uint64_t seed = 1;
  std::string start_date = "2013-10-28";
  std::map<std::string, double> theta_overrides;  // player id -> effect
};

struct TruthRecord {
  double mu = 0.0;
  double sigma = 0.0;
  std::map<std::string, double> coefficients;  // theta:<player> / tau:<team>
};

struct SimResult {
  std::vector<GameLog> logs;
  TruthRecord truth;
};

std::string sim_team_id(int team);
std::string sim_player_id(int team, int slot);

SimResult generate_season(const SimConfig& config);

void save_truth_csv(const TruthRecord& truth, const std::string& path);
TruthRecord load_truth_csv(const std::string& path);

}  // namespace winshift
