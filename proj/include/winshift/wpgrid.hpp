#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "winshift/events.hpp"

namespace winshift {

// Win-probability surface p(T, L): the probability that the home team wins
// given it leads by L points after T elapsed seconds. Estimated by windowed
// Beta-Binomial smoothing of historical game states. Leads clamp to
// [-lead_max, lead_max]; the time axis runs through regulation plus max_ot
// overtimes and clamps beyond.

struct GridAxes {
  int max_ot = 5;
  int lead_max = 60;

  int t_max() const { return 2880 + 300 * max_ot; }
  int n_times() const { return t_max() + 1; }
  int n_leads() const { return 2 * lead_max + 1; }
  std::size_t cells() const {
    return static_cast<std::size_t>(n_times()) * static_cast<std::size_t>(n_leads());
  }
  int clamp_time(int t) const { return t < 0 ? 0 : (t > t_max() ? t_max() : t); }
  int clamp_lead(int lead) const {
    return lead < -lead_max ? -lead_max : (lead > lead_max ? lead_max : lead);
  }
  std::size_t index(int t, int lead) const {
    return static_cast<std::size_t>(t) * n_leads() + (lead + lead_max);
  }
};

struct CountGrid {
  GridAxes axes;
  std::vector<std::uint32_t> games;  // N[T][L]
  std::vector<std::uint32_t> wins;   // n[T][L]

  explicit CountGrid(GridAxes a = {}) : axes(a), games(a.cells(), 0), wins(a.cells(), 0) {}
  std::uint32_t games_at(int t, int lead) const { return games[axes.index(t, lead)]; }
  std::uint32_t wins_at(int t, int lead) const { return wins[axes.index(t, lead)]; }
};

struct SmoothingConfig {
  int h_t = 3;
  int h_l = 2;
  int pseudo_per_cell = 10;   // total pseudo-games added to each unit cell
  int lead_threshold = 20;    // |lead| beyond which all pseudo-games go one way
};

struct WinProbGrid {
  GridAxes axes;
  std::vector<double> phat;  // posterior mean
  std::vector<double> psd;   // posterior standard deviation
  std::vector<std::uint32_t> games;
  std::vector<std::uint32_t> wins;

  double lookup(int t, int lead) const {
    return phat[axes.index(axes.clamp_time(t), axes.clamp_lead(lead))];
  }
  double sd_at(int t, int lead) const {
    return psd[axes.index(axes.clamp_time(t), axes.clamp_lead(lead))];
  }
};

// One count per game per second of play at the cell (t, lead at t); leads
// beyond the axis clamp to the boundary, as do seconds beyond t_max.
CountGrid accumulate_counts(const std::vector<GameLog>& logs, GridAxes axes = {});

// Beta prior parameters (alpha, beta) for the window centred at (T, L):
// each in-bounds unit cell contributes pseudo_per_cell pseudo-games, all
// wins when the cell lead exceeds +lead_threshold, all losses below
// -lead_threshold, an even split in between. Cells outside the axes
// contribute nothing, so windows truncate near the edges.
std::pair<double, double> pseudo_counts(int T, int L, const GridAxes& axes,
                                        const SmoothingConfig& cfg);

// Observed (wins, games) summed over the in-bounds window cells.
std::pair<std::uint64_t, std::uint64_t> window_counts(const CountGrid& counts, int T, int L,
                                                      int h_t, int h_l);

// Posterior mean and standard deviation of the Beta posterior with
// a = n_w + alpha and b = N_w - n_w + beta.
std::pair<double, double> estimate_cell(double n_w, double N_w, double alpha, double beta);

WinProbGrid build_grid(const CountGrid& counts, const SmoothingConfig& cfg = {});

// Grid file: CSV columns T, L, N, n, phat, psd, one row per unit cell.
void save_grid_csv(const WinProbGrid& grid, const std::string& path);
WinProbGrid load_grid_csv(const std::string& path);

// Brownian-motion probit comparator: p = Phi((lead + drift*f) /
// (volatility*sqrt(f))) with f the fraction of the game remaining.
struct ProbitBaseline {
  double drift = 0.0;       // points per game
  double volatility = 1.0;  // points per sqrt(game)
};

double probit_wp(int lead, double frac_remaining, const ProbitBaseline& baseline);

// Maximum-likelihood fit on the end-of-period margins of the first three
// periods of each game.
ProbitBaseline fit_probit_baseline(const std::vector<GameLog>& logs);

}  // namespace winshift
