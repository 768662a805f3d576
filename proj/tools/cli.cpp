#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "winshift/blasso.hpp"
#include "winshift/csv.hpp"
#include "winshift/dataset.hpp"
#include "winshift/diagnostics.hpp"
#include "winshift/errors.hpp"
#include "winshift/events.hpp"
#include "winshift/metrics.hpp"
#include "winshift/rng.hpp"
#include "winshift/shifts.hpp"
#include "winshift/simgen.hpp"
#include "winshift/stats.hpp"
#include "winshift/wpgrid.hpp"

namespace fs = std::filesystem;

namespace winshift {

namespace {

struct SeasonRange {
  int lo = 0;
  int hi = 0;
};

SeasonRange parse_season_range(const std::string& text) {
  SeasonRange range;
  auto dash = text.find('-');
  try {
    if (dash == std::string::npos) {
      range.lo = range.hi = std::stoi(text);
    } else {
      range.lo = std::stoi(text.substr(0, dash));
      range.hi = std::stoi(text.substr(dash + 1));
    }
  } catch (const std::exception&) {
    throw ValidationError("bad season range '" + text + "', expected YYYY or YYYY-YYYY");
  }
  if (range.lo > range.hi) throw ValidationError("season range '" + text + "' is reversed");
  return range;
}

void check_cutoff_date(const std::string& date) {
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') {
    throw ValidationError("bad date '" + date + "', expected YYYY-MM-DD");
  }
}

struct GameFilter {
  std::string train_seasons;
  std::string apply_season;
  std::string before_date;

  std::vector<GameLog> apply(std::vector<GameLog> logs) const {
    std::optional<SeasonRange> range;
    if (!train_seasons.empty()) range = parse_season_range(train_seasons);
    std::optional<SeasonRange> apply_range;
    if (!apply_season.empty()) apply_range = parse_season_range(apply_season);
    if (!before_date.empty()) check_cutoff_date(before_date);

    std::vector<GameLog> kept;
    for (auto& log : logs) {
      int season = season_of(log.date);
      if (range && (season < range->lo || season > range->hi)) continue;
      if (apply_range && (season < apply_range->lo || season > apply_range->hi)) continue;
      if (!before_date.empty() && log.date > before_date) continue;
      kept.push_back(std::move(log));
    }
    if (kept.empty()) throw ValidationError("no games left after season/date filtering");
    return kept;
  }
};

void add_filter_options(CLI::App* cmd, GameFilter& filter, bool train, bool apply) {
  if (train) {
    cmd->add_option("--train-seasons", filter.train_seasons,
                    "season or YYYY-YYYY range used to fit the grid");
  }
  if (apply) {
    cmd->add_option("--apply-season", filter.apply_season,
                    "season or range whose shifts enter the regression");
    cmd->add_option("--before-date", filter.before_date,
                    "keep only games on or before this date (YYYY-MM-DD)");
  }
}

std::string strip_prefix(const std::string& name) {
  if (name.rfind("theta:", 0) == 0) return name.substr(6);
  if (name.rfind("tau:", 0) == 0) return name.substr(4);
  return name;
}

std::array<std::string, 5> parse_lineup(const std::string& text) {
  auto parts = split_csv_line(text);
  if (parts.size() != 5) {
    throw ValidationError("lineup '" + text + "' must list exactly five player ids");
  }
  std::array<std::string, 5> lineup;
  for (std::size_t i = 0; i < 5; ++i) {
    if (parts[i].empty()) throw ValidationError("lineup '" + text + "' has an empty player id");
    lineup[i] = player_col_name(parts[i]);
  }
  return lineup;
}

std::string out_path(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

// --config FILE holds key=value lines naming long options of the invoked
// subcommand. Explicit flags win: config keys already present on the
// command line are ignored.
std::vector<std::string> expand_config_args(std::vector<std::string> args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a file argument");
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;

  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    auto eq = a.find('=');
    given.insert(eq == std::string::npos ? a.substr(2) : a.substr(2, eq - 2));
  }

  std::ifstream in(config_path);
  if (!in) throw ValidationError("cannot open config file " + config_path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError(config_path + ":" + std::to_string(line_no) +
                            ": expected key=value");
    }
    std::string key = trimmed.substr(0, eq);
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string value = trimmed.substr(eq + 1);
    if (key.empty()) {
      throw ValidationError(config_path + ":" + std::to_string(line_no) + ": empty key");
    }
    if (given.count(key) != 0) continue;
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string out_dir;
  SimConfig config;
  double zero_effects = false;
};

void run_simulate(const SimulateOpts& opts) {
  fs::create_directories(opts.out_dir);
  SimResult result = generate_season(opts.config);
  save_events_csv(result.logs, out_path(opts.out_dir, "events.csv"));
  save_truth_csv(result.truth, out_path(opts.out_dir, "truth.csv"));
  std::size_t n_shifts = 0;
  for (const auto& log : result.logs) n_shifts += segment_shifts(log).size();
  std::cout << "simulated " << result.logs.size() << " games, "
            << static_cast<double>(n_shifts) / result.logs.size()
            << " shifts/game -> " << out_path(opts.out_dir, "events.csv") << "\n";
}

// ------------------------------------------------------------------ ingest

void run_ingest(const std::string& events_path) {
  auto logs = parse_events_file(events_path);
  std::size_t n_events = 0, n_shifts = 0;
  std::map<int, int> seasons;
  for (const auto& log : logs) {
    n_events += log.events.size();
    n_shifts += segment_shifts(log).size();
    seasons[season_of(log.date)] += 1;
  }
  std::cout << "games: " << logs.size() << "\nevents: " << n_events
            << "\nshifts: " << n_shifts << "\nseasons:";
  for (const auto& [season, count] : seasons) std::cout << ' ' << season << ':' << count;
  std::cout << "\n";
}

// ----------------------------------------------------------------- winprob

struct WinprobOpts {
  std::string events;
  std::string grid;
  std::string probit_out;
  GameFilter filter;
  SmoothingConfig smoothing;
  int max_ot = 5;
};

void run_winprob(const WinprobOpts& opts) {
  auto logs = opts.filter.apply(parse_events_file(opts.events));
  GridAxes axes;
  axes.max_ot = opts.max_ot;
  CountGrid counts = accumulate_counts(logs, axes);
  WinProbGrid grid = build_grid(counts, opts.smoothing);
  save_grid_csv(grid, opts.grid);
  std::cout << "grid over " << logs.size() << " games -> " << opts.grid << "\n";
  if (!opts.probit_out.empty()) {
    ProbitBaseline baseline = fit_probit_baseline(logs);
    auto out = open_output(opts.probit_out);
    out << "param,value\n";
    out << "drift," << fmt_double(baseline.drift) << '\n';
    out << "volatility," << fmt_double(baseline.volatility) << '\n';
    std::cout << "probit baseline: drift=" << baseline.drift
              << " volatility=" << baseline.volatility << " -> " << opts.probit_out << "\n";
  }
}

// ------------------------------------------------------------------- build

struct BuildOpts {
  std::string events;
  std::string grid;
  std::string dataset;
  std::string shifts_out;
  GameFilter filter;
};

void run_build(const BuildOpts& opts) {
  auto logs = opts.filter.apply(parse_events_file(opts.events));
  WinProbGrid grid = load_grid_csv(opts.grid);
  auto shifts = segment_shifts(logs);
  annotate_shifts(shifts, grid);
  RegressionDataset data = build_dataset(shifts);
  save_dataset_csv(data, opts.dataset);
  if (!opts.shifts_out.empty()) save_shifts_csv(shifts, opts.shifts_out);
  std::cout << "dataset: " << data.n() << " shifts, " << data.n_players << " players, "
            << data.n_teams << " teams -> " << opts.dataset << "\n";
}

// --------------------------------------------------------------------- fit

struct FitOpts {
  std::string dataset;
  std::string draws;
  SamplerConfig config;
  double fixed_lambda2 = 0.0;
  bool has_fixed_lambda2 = false;
};

void run_fit(const FitOpts& opts) {
  RegressionDataset data = load_dataset_csv(opts.dataset);
  SamplerConfig config = opts.config;
  if (opts.has_fixed_lambda2) config.fixed_lambda2 = opts.fixed_lambda2;
  PosteriorDraws draws = gibbs_fit(data, config);
  save_draws_csv(draws, opts.draws);
  std::cout << "kept " << draws.n_draws() << " draws over " << draws.n_coefs()
            << " coefficients -> " << opts.draws << "\n";
}

// ------------------------------------------------------------------ report

struct ReportOpts {
  std::string draws;
  std::string shifts;
  std::string out_dir;
  int min_shifts = 1;
  int k_similar = 4;
  std::vector<std::string> teams;
  std::vector<std::string> players;       // similarity targets
  std::vector<std::string> kde_players;
  std::vector<std::string> lineups;
  int top_lineups = 0;
  std::string external;
  bool rank_intervals = false;
};

void run_report(const ReportOpts& opts) {
  fs::create_directories(opts.out_dir);
  PosteriorDraws draws = load_draws_csv(opts.draws);
  auto shifts = load_shifts_csv(opts.shifts);
  auto profiles = leverage_profiles(shifts);
  std::map<std::string, const LeverageProfile*> profile_of;
  for (const auto& p : profiles) profile_of[p.player] = &p;

  // impact_scores.csv
  std::vector<ImpactSummary> scores;
  for (const auto& name : draws.coef_names) {
    if (name.rfind("theta:", 0) == 0) scores.push_back(impact_score(draws, name));
  }
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    return a.impact_score > b.impact_score;
  });
  {
    auto out = open_output(out_path(opts.out_dir, "impact_scores.csv"));
    out << "player,mean,sd,score,frac_positive,n_shifts\n";
    for (const auto& s : scores) {
      std::string player = strip_prefix(s.id);
      auto it = profile_of.find(player);
      int n_shifts = it == profile_of.end() ? 0 : it->second->n_shifts;
      if (n_shifts < opts.min_shifts) continue;
      out << player << ',' << fmt_double(s.post_mean) << ',' << fmt_double(s.post_sd) << ','
          << fmt_double(s.impact_score) << ',' << fmt_double(s.frac_positive) << ','
          << n_shifts << '\n';
    }
  }

  // team_effects.csv
  {
    auto out = open_output(out_path(opts.out_dir, "team_effects.csv"));
    out << "team,mean,sd,score,frac_positive\n";
    for (const auto& name : draws.coef_names) {
      if (name.rfind("tau:", 0) != 0) continue;
      ImpactSummary s = impact_score(draws, name);
      out << strip_prefix(name) << ',' << fmt_double(s.post_mean) << ','
          << fmt_double(s.post_sd) << ',' << fmt_double(s.impact_score) << ','
          << fmt_double(s.frac_positive) << '\n';
    }
  }

  // rankings_<team>.csv
  auto rosters = rosters_from_shifts(shifts);
  std::vector<std::string> teams = opts.teams;
  if (teams.empty()) {
    for (const auto& [team, roster] : rosters) teams.push_back(team);
  }
  for (const auto& team : teams) {
    auto it = rosters.find(team);
    if (it == rosters.end()) throw ValidationError("no shifts for team '" + team + "'");
    std::vector<std::string> roster;
    for (const auto& p : it->second) roster.push_back(player_col_name(p));
    TeamRanking ranking = impact_ranking(draws, team, roster);
    auto out = open_output(out_path(opts.out_dir, "rankings_" + team + ".csv"));
    out << "rank,player,avg_rank,p_next\n";
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
      const auto& e = ranking.entries[i];
      out << (i + 1) << ',' << strip_prefix(e.player) << ',' << fmt_double(e.avg_rank) << ',';
      if (e.p_next >= 0.0) out << fmt_double(e.p_next);
      out << '\n';
    }
  }

  // similar_<player>.csv
  for (const auto& player : opts.players) {
    auto neighbors = similar_players(profiles, player, opts.k_similar);
    auto out = open_output(out_path(opts.out_dir, "similar_" + player + ".csv"));
    out << "player,distance\n";
    for (const auto& [other, dist] : neighbors) {
      out << other << ',' << fmt_double(dist) << '\n';
    }
  }

  // kde_<player>.csv
  for (const auto& player : opts.kde_players) {
    auto samples = draws.coef_column(draws.col_of(player_col_name(player)));
    KdeCurve curve = kde_curve(samples);
    auto out = open_output(out_path(opts.out_dir, "kde_" + player + ".csv"));
    out << "x,density\n";
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
      out << fmt_double(curve.x[i]) << ',' << fmt_double(curve.density[i]) << '\n';
    }
  }

  // lineup_scores.csv for requested lineups
  if (!opts.lineups.empty()) {
    auto out = open_output(out_path(opts.out_dir, "lineup_scores.csv"));
    out << "lineup,mean,sd,score,frac_positive\n";
    for (const auto& text : opts.lineups) {
      auto lineup = parse_lineup(text);
      LineupEffect effect = lineup_effect(draws, lineup);
      out << text << ',' << fmt_double(effect.summary.post_mean) << ','
          << fmt_double(effect.summary.post_sd) << ','
          << fmt_double(effect.summary.impact_score) << ','
          << fmt_double(effect.summary.frac_positive) << '\n';
    }
  }

  // top_lineups.csv over lineups observed in the shifts
  if (opts.top_lineups > 0) {
    std::map<std::array<std::string, 5>, long> seconds;
    for (const auto& s : shifts) {
      seconds[s.home_players] += s.duration();
      seconds[s.away_players] += s.duration();
    }
    struct Entry {
      std::string label;
      long secs;
      ImpactSummary summary;
    };
    std::vector<Entry> entries;
    for (const auto& [players, secs] : seconds) {
      std::array<std::string, 5> lineup;
      for (std::size_t i = 0; i < 5; ++i) lineup[i] = player_col_name(players[i]);
      LineupEffect effect = lineup_effect(draws, lineup);
      std::string label = players[0];
      for (std::size_t i = 1; i < 5; ++i) label += "|" + players[i];
      entries.push_back({label, secs, effect.summary});
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.summary.impact_score > b.summary.impact_score;
    });
    if (static_cast<int>(entries.size()) > opts.top_lineups) {
      entries.resize(static_cast<std::size_t>(opts.top_lineups));
    }
    auto out = open_output(out_path(opts.out_dir, "top_lineups.csv"));
    out << "lineup,seconds,mean,sd,score\n";
    for (const auto& e : entries) {
      out << e.label << ',' << e.secs << ',' << fmt_double(e.summary.post_mean) << ','
          << fmt_double(e.summary.post_sd) << ',' << fmt_double(e.summary.impact_score) << '\n';
    }
  }

  // external_scatter.csv joining a user-supplied metric file
  if (!opts.external.empty()) {
    CsvReader reader(opts.external);
    if (reader.header().size() < 2 || reader.header()[0] != "player") {
      throw ValidationError(opts.external + ": expected header player,<metric>");
    }
    std::string metric = reader.header()[1];
    std::map<std::string, double> external;
    std::vector<std::string> f;
    while (reader.next(f)) {
      external[f[0]] = parse_double(f[1], opts.external);
    }
    auto out = open_output(out_path(opts.out_dir, "external_scatter.csv"));
    out << "player,score," << metric << '\n';
    for (const auto& s : scores) {
      std::string player = strip_prefix(s.id);
      auto it = external.find(player);
      if (it == external.end()) continue;
      out << player << ',' << fmt_double(s.impact_score) << ',' << fmt_double(it->second) << '\n';
    }
  }

  // rank_intervals.csv: per-draw league-wide ranks (optional diagnostics)
  if (opts.rank_intervals) {
    std::vector<int> cols;
    std::vector<std::string> names;
    for (const auto& name : draws.coef_names) {
      if (name.rfind("theta:", 0) == 0) {
        cols.push_back(draws.col_of(name));
        names.push_back(strip_prefix(name));
      }
    }
    std::size_t k = cols.size();
    std::vector<std::vector<double>> ranks(k);
    std::vector<std::size_t> order(k);
    for (int s = 0; s < draws.n_draws(); ++s) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return draws.coef(s, cols[a]) > draws.coef(s, cols[b]);
      });
      for (std::size_t pos = 0; pos < k; ++pos) {
        ranks[order[pos]].push_back(static_cast<double>(pos + 1));
      }
    }
    auto out = open_output(out_path(opts.out_dir, "rank_intervals.csv"));
    out << "player,mean_rank,rank_lo,rank_hi\n";
    for (std::size_t i = 0; i < k; ++i) {
      std::sort(ranks[i].begin(), ranks[i].end());
      out << names[i] << ',' << fmt_double(mean(ranks[i])) << ','
          << fmt_double(quantile_sorted(ranks[i], 0.025)) << ','
          << fmt_double(quantile_sorted(ranks[i], 0.975)) << '\n';
    }
  }

  std::cout << "reports -> " << opts.out_dir << "\n";
}

// ----------------------------------------------------------------- matchup

struct MatchupOpts {
  std::string draws;
  std::string home;
  std::string home_team;
  std::string away;
  std::string away_team;
  std::uint64_t seed = 1;
  std::string out;
};

void run_matchup(const MatchupOpts& opts) {
  PosteriorDraws draws = load_draws_csv(opts.draws);
  Rng rng(derive_seed(opts.seed, "matchup"));
  MatchupResult result =
      matchup_predict(draws, parse_lineup(opts.home), team_col_name(opts.home_team),
                      parse_lineup(opts.away), team_col_name(opts.away_team), rng);
  std::cout << "mean=" << result.mean << " p_positive=" << result.p_positive
            << " q025=" << result.q025 << " q50=" << result.q50 << " q975=" << result.q975
            << "\n";
  if (!opts.out.empty()) {
    auto out = open_output(opts.out);
    out << "draw,value\n";
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
      out << i << ',' << fmt_double(result.samples[i]) << '\n';
    }
  }
}

// ---------------------------------------------------------------- diagnose

struct DiagnoseOpts {
  std::string events;
  std::string grid;
  std::string draws;
  std::string out_dir;
  GameFilter filter;
  int bins = 10;
  int max_lag = 30;
  double target_sd = 0.0;  // 0: emit the standard 1 / 0.03 / 0.12 trio
  std::string response = "y1";
  bool emit_reweighted = false;
};

void run_diagnose(const DiagnoseOpts& opts) {
  fs::create_directories(opts.out_dir);
  auto logs = opts.filter.apply(parse_events_file(opts.events));
  WinProbGrid grid = load_grid_csv(opts.grid);
  auto shifts = segment_shifts(logs);
  annotate_shifts(shifts, grid);
  RegressionDataset data = build_dataset(shifts);

  ResponseVariant y1 = transform_response(shifts, ResponseTag::y1);

  // Autocorrelation of the raw response in shift order.
  {
    auto values = acf(y1.values, opts.max_lag);
    auto out = open_output(out_path(opts.out_dir, "acf.csv"));
    out << "lag,acf\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
      out << (i + 1) << ',' << fmt_double(values[i]) << '\n';
    }
  }

  // Histograms of the transformed responses.
  for (ResponseTag tag : {ResponseTag::y1, ResponseTag::y2, ResponseTag::y3}) {
    ResponseVariant v = transform_response(shifts, tag);
    Histogram h = histogram(v.values, 60);
    auto out = open_output(out_path(opts.out_dir, std::string("hist_") + to_string(tag) + ".csv"));
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << fmt_double(h.edges[b]) << ',' << fmt_double(h.edges[b + 1]) << ',' << h.counts[b]
          << '\n';
    }
  }

  // Binned heteroscedasticity summary of the raw response.
  auto edges = default_bin_edges(opts.bins);
  std::vector<double> start_wps;
  start_wps.reserve(shifts.size());
  for (const auto& s : shifts) start_wps.push_back(s.wp_start);
  {
    BinnedSd sds = binned_sd(y1.values, start_wps, edges);
    auto out = open_output(out_path(opts.out_dir, "binned_sd.csv"));
    out << "bin_lo,bin_hi,count,sd\n";
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      out << fmt_double(edges[b]) << ',' << fmt_double(edges[b + 1]) << ',' << sds.counts[b]
          << ',' << fmt_double(sds.sds[b]) << '\n';
    }
  }

  // Reweighting schemes: verify the fixed point and optionally emit the
  // reweighted datasets for refitting.
  std::vector<std::pair<ResponseTag, double>> schemes;
  if (opts.target_sd > 0.0) {
    schemes.emplace_back(ResponseTag::y5, opts.target_sd);
  } else {
    schemes = {{ResponseTag::y4, 1.0}, {ResponseTag::y5, 0.03}, {ResponseTag::y6, 0.12}};
  }
  for (const auto& [tag, target] : schemes) {
    ReweightResult rw = reweight_dataset(data, edges, target);
    std::vector<double> ys;
    ys.reserve(rw.dataset.rows.size());
    for (const auto& row : rw.dataset.rows) ys.push_back(row.y);
    BinnedSd after = binned_sd(ys, start_wps, edges);
    auto out = open_output(out_path(opts.out_dir,
                                    std::string("binned_sd_") + to_string(tag) + ".csv"));
    out << "bin_lo,bin_hi,count,sd\n";
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      out << fmt_double(edges[b]) << ',' << fmt_double(edges[b + 1]) << ',' << after.counts[b]
          << ',' << fmt_double(after.sds[b]) << '\n';
    }
    Histogram h = histogram(ys, 60);
    auto hist_out = open_output(out_path(opts.out_dir,
                                         std::string("hist_") + to_string(tag) + ".csv"));
    hist_out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      hist_out << fmt_double(h.edges[b]) << ',' << fmt_double(h.edges[b + 1]) << ','
               << h.counts[b] << '\n';
    }
    if (opts.emit_reweighted) {
      save_dataset_csv(rw.dataset,
                       out_path(opts.out_dir, std::string("dataset_") + to_string(tag) + ".csv"));
    }
  }

  // Residuals and QQ data against the supplied draws.
  if (!opts.draws.empty()) {
    PosteriorDraws draws = load_draws_csv(opts.draws);
    RegressionDataset fit_data = data;
    if (opts.response != "y1") {
      ResponseTag tag;
      if (opts.response == "y2") {
        tag = ResponseTag::y2;
      } else if (opts.response == "y3") {
        tag = ResponseTag::y3;
      } else {
        throw ValidationError("unknown --response '" + opts.response + "', expected y1, y2 or y3");
      }
      ResponseVariant v = transform_response(shifts, tag);
      for (std::size_t i = 0; i < fit_data.rows.size(); ++i) fit_data.rows[i].y = v.values[i];
    }
    ResidualSet res = residual_diagnostics(fit_data, draws);
    {
      auto out = open_output(out_path(opts.out_dir, "residuals.csv"));
      out << "fitted,residual\n";
      for (std::size_t i = 0; i < res.fitted.size(); ++i) {
        out << fmt_double(res.fitted[i]) << ',' << fmt_double(res.residuals[i]) << '\n';
      }
    }
    QqData qq = qq_data(res.residuals);
    auto out = open_output(out_path(opts.out_dir, "qq.csv"));
    out << "normal_q,residual,studentized\n";
    for (std::size_t i = 0; i < qq.raw.size(); ++i) {
      out << fmt_double(qq.normal_q[i]) << ',' << fmt_double(qq.raw[i]) << ','
          << fmt_double(qq.studentized[i]) << '\n';
    }
  }

  std::cout << "diagnostics -> " << opts.out_dir << "\n";
}

// ---------------------------------------------------------------- permtest

struct PermtestOpts {
  std::string scores_a;
  std::string scores_b;
  std::string column = "score";
  int n_perm = 10000;
  std::uint64_t seed = 1;
  std::string out;
};

std::map<std::string, double> load_score_file(const std::string& path, const std::string& column) {
  CsvReader reader(path);
  int player_col = -1, value_col = -1;
  for (std::size_t i = 0; i < reader.header().size(); ++i) {
    if (reader.header()[i] == "player") player_col = static_cast<int>(i);
    if (reader.header()[i] == column) value_col = static_cast<int>(i);
  }
  if (player_col < 0 || value_col < 0) {
    throw ValidationError(path + ": missing column 'player' or '" + column + "'");
  }
  std::map<std::string, double> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    out[f[static_cast<std::size_t>(player_col)]] =
        parse_double(f[static_cast<std::size_t>(value_col)], path);
  }
  return out;
}

void run_permtest(const PermtestOpts& opts) {
  auto a = load_score_file(opts.scores_a, opts.column);
  auto b = load_score_file(opts.scores_b, opts.column);
  std::vector<std::string> joined;
  std::vector<double> x, y;
  for (const auto& [player, value] : a) {
    auto it = b.find(player);
    if (it == b.end()) continue;
    joined.push_back(player);
    x.push_back(value);
    y.push_back(it->second);
  }
  if (x.size() < 3) throw ValidationError("fewer than three players shared between score files");
  Rng rng(derive_seed(opts.seed, "permtest"));
  PermTestResult result = perm_test_corr(x, y, opts.n_perm, rng);
  std::cout << "n=" << x.size() << " corr=" << result.corr << " p=" << result.p_value
            << " (two-sided, " << result.n_perm << " permutations)\n";
  if (!opts.out.empty()) {
    auto out = open_output(opts.out);
    out << "player,a,b\n";
    for (std::size_t i = 0; i < joined.size(); ++i) {
      out << joined[i] << ',' << fmt_double(x[i]) << ',' << fmt_double(y[i]) << '\n';
    }
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{
      "winshift: win-probability player impact pipeline\n"
      "Every subcommand accepts --config FILE with key=value lines naming its\n"
      "long options; explicit flags override config values."};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "generate a synthetic season with known effects");
  c_sim->add_option("--out-dir", sim.out_dir, "output directory")->required();
  c_sim->add_option("--seed", sim.config.seed, "rng seed");
  c_sim->add_option("--teams", sim.config.n_teams, "number of teams");
  c_sim->add_option("--roster", sim.config.roster_size, "players per team");
  c_sim->add_option("--games", sim.config.n_games, "number of games");
  c_sim->add_option("--shifts-per-game", sim.config.shifts_per_game, "expected shifts per game");
  c_sim->add_option("--mu", sim.config.mu_true, "true home-court effect");
  c_sim->add_option("--theta", sim.config.theta_magnitude, "player effect magnitude");
  c_sim->add_option("--tau", sim.config.tau_magnitude, "team effect magnitude");
  c_sim->add_option("--sigma", sim.config.sigma_true, "recorded noise scale");
  c_sim->add_option("--base-rate", sim.config.base_event_rate, "scoring events per second per team");
  c_sim->add_option("--rate-gain", sim.config.rate_gain, "event-rate change per unit effect");
  c_sim->add_option("--start-date", sim.config.start_date, "date of the first game");
  c_sim->callback([&]() { run_simulate(sim); });

  std::string ingest_events;
  auto* c_ingest = app.add_subcommand("ingest", "validate an event file and print a summary");
  c_ingest->add_option("--events", ingest_events, "event CSV")->required();
  c_ingest->callback([&]() { run_ingest(ingest_events); });

  WinprobOpts wp;
  auto* c_wp = app.add_subcommand("winprob", "estimate the win-probability grid");
  c_wp->add_option("--events", wp.events, "event CSV")->required();
  c_wp->add_option("--grid", wp.grid, "output grid CSV")->required();
  c_wp->add_option("--ht", wp.smoothing.h_t, "time half-window (seconds)");
  c_wp->add_option("--hl", wp.smoothing.h_l, "lead half-window (points)");
  c_wp->add_option("--max-ot", wp.max_ot, "overtimes covered by the grid");
  c_wp->add_option("--probit-out", wp.probit_out, "also fit the probit baseline");
  add_filter_options(c_wp, wp.filter, true, false);
  c_wp->callback([&]() { run_winprob(wp); });

  BuildOpts build;
  auto* c_build = app.add_subcommand("build", "segment shifts and assemble the dataset");
  c_build->add_option("--events", build.events, "event CSV")->required();
  c_build->add_option("--grid", build.grid, "grid CSV from winprob")->required();
  c_build->add_option("--dataset", build.dataset, "output dataset CSV")->required();
  c_build->add_option("--shifts", build.shifts_out, "also write the annotated shifts");
  add_filter_options(c_build, build.filter, false, true);
  c_build->callback([&]() { run_build(build); });

  FitOpts fit;
  auto* c_fit = app.add_subcommand("fit", "run the Gibbs sampler");
  c_fit->add_option("--dataset", fit.dataset, "dataset CSV")->required();
  c_fit->add_option("--draws", fit.draws, "output draws CSV")->required();
  c_fit->add_option("--burn-in", fit.config.burn_in, "discarded sweeps");
  c_fit->add_option("--thin", fit.config.thin, "keep every thin-th state");
  c_fit->add_option("--keep", fit.config.n_keep, "retained draws");
  c_fit->add_option("--seed", fit.config.seed, "rng seed");
  c_fit->add_option("--r", fit.config.r, "lambda^2 hyper-prior shape");
  c_fit->add_option("--delta", fit.config.delta, "lambda^2 hyper-prior rate");
  auto* fl = c_fit->add_option("--fixed-lambda2", fit.fixed_lambda2,
                               "disable the hyper-update and fix lambda^2");
  c_fit->callback([&]() {
    fit.has_fixed_lambda2 = fl->count() > 0;
    run_fit(fit);
  });

  ReportOpts report;
  auto* c_report = app.add_subcommand("report", "emit impact scores, rankings and profiles");
  c_report->add_option("--draws", report.draws, "draws CSV")->required();
  c_report->add_option("--shifts", report.shifts, "annotated shifts CSV")->required();
  c_report->add_option("--out-dir", report.out_dir, "report directory")->required();
  c_report->add_option("--min-shifts", report.min_shifts, "minimum shifts to list a player");
  c_report->add_option("--team", report.teams, "restrict rankings to these teams");
  c_report->add_option("--player", report.players, "emit leverage neighbours for these players");
  c_report->add_option("--k", report.k_similar, "neighbours per similarity query");
  c_report->add_option("--kde", report.kde_players, "emit posterior density curves");
  c_report->add_option("--lineup", report.lineups, "score a five-player lineup (comma list)");
  c_report->add_option("--top-lineups", report.top_lineups, "rank the observed lineups");
  c_report->add_option("--external", report.external, "join an external metric CSV");
  c_report->add_flag("--rank-intervals", report.rank_intervals, "emit league-rank intervals");
  c_report->callback([&]() { run_report(report); });

  MatchupOpts matchup;
  auto* c_match = app.add_subcommand("matchup", "posterior predictive for a lineup matchup");
  c_match->add_option("--draws", matchup.draws, "draws CSV")->required();
  c_match->add_option("--home", matchup.home, "home lineup, five comma-separated ids")->required();
  c_match->add_option("--home-team", matchup.home_team, "home team id")->required();
  c_match->add_option("--away", matchup.away, "away lineup")->required();
  c_match->add_option("--away-team", matchup.away_team, "away team id")->required();
  c_match->add_option("--seed", matchup.seed, "rng seed");
  c_match->add_option("--out", matchup.out, "write predictive samples CSV");
  c_match->callback([&]() { run_matchup(matchup); });

  DiagnoseOpts diag;
  auto* c_diag = app.add_subcommand("diagnose", "model-checking outputs");
  c_diag->add_option("--events", diag.events, "event CSV")->required();
  c_diag->add_option("--grid", diag.grid, "grid CSV")->required();
  c_diag->add_option("--draws", diag.draws, "draws CSV for residual diagnostics");
  c_diag->add_option("--out-dir", diag.out_dir, "output directory")->required();
  c_diag->add_option("--bins", diag.bins, "starting win-probability bins");
  c_diag->add_option("--max-lag", diag.max_lag, "autocorrelation lags");
  c_diag->add_option("--target-sd", diag.target_sd, "single reweighting target");
  c_diag->add_option("--response", diag.response, "residual response: y1, y2 or y3");
  c_diag->add_flag("--emit-reweighted", diag.emit_reweighted, "write reweighted datasets");
  add_filter_options(c_diag, diag.filter, false, true);
  c_diag->callback([&]() { run_diagnose(diag); });

  PermtestOpts perm;
  auto* c_perm = app.add_subcommand("permtest", "permutation test between two score files");
  c_perm->add_option("--scores-a", perm.scores_a, "first score CSV")->required();
  c_perm->add_option("--scores-b", perm.scores_b, "second score CSV")->required();
  c_perm->add_option("--column", perm.column, "value column name");
  c_perm->add_option("--n-perm", perm.n_perm, "number of permutations");
  c_perm->add_option("--seed", perm.seed, "rng seed");
  c_perm->add_option("--out", perm.out, "write the joined pairs");
  c_perm->callback([&]() { run_permtest(perm); });

  std::vector<std::string> argv_store;
  try {
    argv_store = expand_config_args(args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  argv_store.insert(argv_store.begin(), "winshift");
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace winshift
