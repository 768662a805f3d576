#include "winshift/wpgrid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "winshift/csv.hpp"
#include "winshift/errors.hpp"
#include "winshift/stats.hpp"

namespace winshift {

CountGrid accumulate_counts(const std::vector<GameLog>& logs, GridAxes axes) {
  CountGrid grid(axes);
  for (const auto& log : logs) {
    auto lead = lead_by_second(log);
    for (int t = 0; t <= log.total_sec; ++t) {
      std::size_t idx = axes.index(axes.clamp_time(t), axes.clamp_lead(lead[t]));
      grid.games[idx] += 1;
      if (log.home_won) grid.wins[idx] += 1;
    }
  }
  return grid;
}

std::pair<double, double> pseudo_counts(int T, int L, const GridAxes& axes,
                                        const SmoothingConfig& cfg) {
  double alpha = 0, beta = 0;
  double half = cfg.pseudo_per_cell / 2.0;
  for (int t = T - cfg.h_t; t <= T + cfg.h_t; ++t) {
    if (t < 0 || t > axes.t_max()) continue;
    for (int l = L - cfg.h_l; l <= L + cfg.h_l; ++l) {
      if (l < -axes.lead_max || l > axes.lead_max) continue;
      if (l > cfg.lead_threshold) {
        alpha += cfg.pseudo_per_cell;
      } else if (l < -cfg.lead_threshold) {
        beta += cfg.pseudo_per_cell;
      } else {
        alpha += half;
        beta += half;
      }
    }
  }
  return {alpha, beta};
}

std::pair<std::uint64_t, std::uint64_t> window_counts(const CountGrid& counts, int T, int L,
                                                      int h_t, int h_l) {
  std::uint64_t n_w = 0, N_w = 0;
  const auto& axes = counts.axes;
  for (int t = T - h_t; t <= T + h_t; ++t) {
    if (t < 0 || t > axes.t_max()) continue;
    for (int l = L - h_l; l <= L + h_l; ++l) {
      if (l < -axes.lead_max || l > axes.lead_max) continue;
      std::size_t idx = axes.index(t, l);
      n_w += counts.wins[idx];
      N_w += counts.games[idx];
    }
  }
  return {n_w, N_w};
}

std::pair<double, double> estimate_cell(double n_w, double N_w, double alpha, double beta) {
  if (!(N_w >= n_w) || n_w < 0) throw ValidationError("estimate_cell: bad counts");
  if (!(alpha + beta > 0)) throw ValidationError("estimate_cell: degenerate prior (alpha+beta=0)");
  double a = n_w + alpha;
  double b = N_w - n_w + beta;
  double total = a + b;
  double phat = a / total;
  double psd = std::sqrt(a * b / (total * total * (total + 1.0)));
  return {phat, psd};
}

WinProbGrid build_grid(const CountGrid& counts, const SmoothingConfig& cfg) {
  WinProbGrid grid;
  grid.axes = counts.axes;
  grid.games = counts.games;
  grid.wins = counts.wins;
  grid.phat.resize(counts.axes.cells());
  grid.psd.resize(counts.axes.cells());
  const auto& axes = counts.axes;
  for (int t = 0; t <= axes.t_max(); ++t) {
    for (int l = -axes.lead_max; l <= axes.lead_max; ++l) {
      auto [n_w, N_w] = window_counts(counts, t, l, cfg.h_t, cfg.h_l);
      auto [alpha, beta] = pseudo_counts(t, l, axes, cfg);
      auto [phat, psd] = estimate_cell(static_cast<double>(n_w), static_cast<double>(N_w),
                                       alpha, beta);
      std::size_t idx = axes.index(t, l);
      grid.phat[idx] = phat;
      grid.psd[idx] = psd;
    }
  }
  return grid;
}

void save_grid_csv(const WinProbGrid& grid, const std::string& path) {
  auto out = open_output(path);
  out << "T,L,N,n,phat,psd\n";
  const auto& axes = grid.axes;
  for (int t = 0; t <= axes.t_max(); ++t) {
    for (int l = -axes.lead_max; l <= axes.lead_max; ++l) {
      std::size_t idx = axes.index(t, l);
      out << t << ',' << l << ',' << grid.games[idx] << ',' << grid.wins[idx] << ','
          << fmt_double(grid.phat[idx]) << ',' << fmt_double(grid.psd[idx]) << '\n';
    }
  }
}

WinProbGrid load_grid_csv(const std::string& path) {
  CsvReader reader(path);
  require_header(reader, {"T", "L", "N", "n", "phat", "psd"});
  std::vector<std::string> f;
  int t_max = -1, lead_max = 0;
  struct Row {
    int t, l;
    std::uint32_t N, n;
    double phat, psd;
  };
  std::vector<Row> rows;
  while (reader.next(f)) {
    const std::string where = path + ":" + std::to_string(reader.line_no());
    Row r;
    r.t = static_cast<int>(parse_int(f[0], where));
    r.l = static_cast<int>(parse_int(f[1], where));
    r.N = static_cast<std::uint32_t>(parse_int(f[2], where));
    r.n = static_cast<std::uint32_t>(parse_int(f[3], where));
    r.phat = parse_double(f[4], where);
    r.psd = parse_double(f[5], where);
    t_max = std::max(t_max, r.t);
    lead_max = std::max(lead_max, std::abs(r.l));
    rows.push_back(r);
  }
  if (t_max < 2880) throw ValidationError(path + ": grid does not cover regulation time");
  if ((t_max - 2880) % 300 != 0) throw ValidationError(path + ": grid t_max not on an overtime boundary");

  WinProbGrid grid;
  grid.axes.max_ot = (t_max - 2880) / 300;
  grid.axes.lead_max = lead_max;
  if (rows.size() != grid.axes.cells()) {
    throw ValidationError(path + ": expected " + std::to_string(grid.axes.cells()) +
                          " cells, got " + std::to_string(rows.size()));
  }
  grid.phat.assign(grid.axes.cells(), 0.0);
  grid.psd.assign(grid.axes.cells(), 0.0);
  grid.games.assign(grid.axes.cells(), 0);
  grid.wins.assign(grid.axes.cells(), 0);
  std::vector<bool> seen(grid.axes.cells(), false);
  for (const auto& r : rows) {
    std::size_t idx = grid.axes.index(r.t, r.l);
    if (seen[idx]) throw ValidationError(path + ": duplicate cell");
    seen[idx] = true;
    grid.phat[idx] = r.phat;
    grid.psd[idx] = r.psd;
    grid.games[idx] = r.N;
    grid.wins[idx] = r.n;
  }
  return grid;
}

double probit_wp(int lead, double frac_remaining, const ProbitBaseline& baseline) {
  if (!(frac_remaining > 0.0) || frac_remaining > 1.0) {
    throw ValidationError("probit_wp: frac_remaining must be in (0,1]");
  }
  if (!(baseline.volatility > 0.0)) throw ValidationError("probit_wp: volatility must be positive");
  double z = (lead + baseline.drift * frac_remaining) /
             (baseline.volatility * std::sqrt(frac_remaining));
  return norm_cdf(z);
}

namespace {

struct MarginObs {
  int lead;
  double frac_remaining;
  bool home_won;
};

double probit_loglik(const std::vector<MarginObs>& obs, double drift, double log_vol) {
  double vol = std::exp(log_vol);
  double ll = 0;
  for (const auto& o : obs) {
    double z = (o.lead + drift * o.frac_remaining) / (vol * std::sqrt(o.frac_remaining));
    double p = norm_cdf(z);
    p = std::min(1.0 - 1e-12, std::max(1e-12, p));
    ll += o.home_won ? std::log(p) : std::log1p(-p);
  }
  return ll;
}

}  // namespace

ProbitBaseline fit_probit_baseline(const std::vector<GameLog>& logs) {
  std::vector<MarginObs> obs;
  for (const auto& log : logs) {
    auto lead = lead_by_second(log);
    for (int q = 1; q <= 3; ++q) {
      int t = 720 * q;
      if (t >= log.total_sec) break;
      obs.push_back({lead[t], 1.0 - t / 2880.0, log.home_won});
    }
  }
  if (obs.size() < 10) throw ValidationError("fit_probit_baseline: too few games");

  // Nelder-Mead on (drift, log volatility).
  std::array<std::array<double, 2>, 3> simplex = {{{3.0, std::log(12.0)},
                                                   {6.0, std::log(12.0)},
                                                   {3.0, std::log(20.0)}}};
  std::array<double, 3> fv;
  auto eval = [&](const std::array<double, 2>& x) { return -probit_loglik(obs, x[0], x[1]); };
  for (int i = 0; i < 3; ++i) fv[i] = eval(simplex[i]);

  for (int iter = 0; iter < 300; ++iter) {
    std::array<int, 3> ord = {0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const auto& best = simplex[ord[0]];
    const auto& second = simplex[ord[1]];
    auto& worst = simplex[ord[2]];
    if (std::abs(fv[ord[2]] - fv[ord[0]]) < 1e-10) break;
    std::array<double, 2> centroid = {(best[0] + second[0]) / 2.0, (best[1] + second[1]) / 2.0};
    std::array<double, 2> refl = {centroid[0] + (centroid[0] - worst[0]),
                                  centroid[1] + (centroid[1] - worst[1])};
    double fr = eval(refl);
    if (fr < fv[ord[0]]) {
      std::array<double, 2> exp_pt = {centroid[0] + 2.0 * (centroid[0] - worst[0]),
                                      centroid[1] + 2.0 * (centroid[1] - worst[1])};
      double fe = eval(exp_pt);
      if (fe < fr) {
        worst = exp_pt;
        fv[ord[2]] = fe;
      } else {
        worst = refl;
        fv[ord[2]] = fr;
      }
    } else if (fr < fv[ord[1]]) {
      worst = refl;
      fv[ord[2]] = fr;
    } else {
      std::array<double, 2> contr = {centroid[0] + 0.5 * (worst[0] - centroid[0]),
                                     centroid[1] + 0.5 * (worst[1] - centroid[1])};
      double fc = eval(contr);
      if (fc < fv[ord[2]]) {
        worst = contr;
        fv[ord[2]] = fc;
      } else {
        for (int i : {1, 2}) {
          for (int d = 0; d < 2; ++d) {
            simplex[ord[i]][d] = best[d] + 0.5 * (simplex[ord[i]][d] - best[d]);
          }
          fv[ord[i]] = eval(simplex[ord[i]]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (fv[i] < fv[best]) best = i;
  }
  return {simplex[best][0], std::exp(simplex[best][1])};
}

}  // namespace winshift
