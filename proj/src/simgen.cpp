#include "winshift/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "winshift/csv.hpp"
#include "winshift/dataset.hpp"
#include "winshift/errors.hpp"
#include "winshift/rng.hpp"

namespace winshift {

namespace {

// Civil-date helpers (days since 1970-01-01).
long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<long>(era) * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, int& m, int& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += m <= 2;
}

std::string date_plus_days(const std::string& date, int offset) {
  int y = std::stoi(date.substr(0, 4));
  int m = std::stoi(date.substr(5, 2));
  int d = std::stoi(date.substr(8, 2));
  long z = days_from_civil(y, m, d) + offset;
  civil_from_days(z, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

struct GameSim {
  const SimConfig& cfg;
  const std::vector<std::vector<double>>& theta;  // [team][slot]
  const std::vector<double>& tau;
  int home, away;
  Rng rng;

  std::set<int> on_home, on_away;  // roster slots on court
  int home_score = 0, away_score = 0;
  double effect = 0.0;
  std::vector<GameEvent> events;
  GameEvent proto;

  void recompute_effect() {
    double a = cfg.mu_true + tau[static_cast<std::size_t>(home)] -
               tau[static_cast<std::size_t>(away)];
    for (int s : on_home) a += theta[static_cast<std::size_t>(home)][static_cast<std::size_t>(s)];
    for (int s : on_away) a -= theta[static_cast<std::size_t>(away)][static_cast<std::size_t>(s)];
    effect = a;
  }

  GameEvent make(int period, int elapsed, EventKind kind) {
    GameEvent ev = proto;
    ev.period = period;
    ev.elapsed_sec = elapsed;
    ev.kind = kind;
    ev.home_score = home_score;
    ev.away_score = away_score;
    return ev;
  }

  std::set<int> pick_lineup() {
    std::vector<int> slots(static_cast<std::size_t>(cfg.roster_size));
    for (int i = 0; i < cfg.roster_size; ++i) slots[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < 5; ++i) {
      int j = i + rng.uniform_int(cfg.roster_size - i);
      std::swap(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
    }
    return {slots.begin(), slots.begin() + 5};
  }

  void swap_player(int period, int elapsed, bool home_side) {
    auto& court = home_side ? on_home : on_away;
    int team = home_side ? home : away;
    auto out_it = court.begin();
    std::advance(out_it, rng.uniform_int(5));
    int out_slot = *out_it;
    std::vector<int> bench;
    for (int s = 0; s < cfg.roster_size; ++s) {
      if (court.count(s) == 0) bench.push_back(s);
    }
    int in_slot = bench[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(bench.size())))];
    court.erase(out_slot);
    court.insert(in_slot);
    GameEvent ev = make(period, elapsed, EventKind::Substitution);
    ev.side = home_side ? TeamSide::Home : TeamSide::Away;
    ev.player_in = sim_player_id(team, in_slot);
    ev.player_out = sim_player_id(team, out_slot);
    events.push_back(std::move(ev));
    recompute_effect();
  }

  void maybe_score(int period, int elapsed) {
    double ph = std::clamp(cfg.base_event_rate + cfg.rate_gain * effect, 0.0, 0.45);
    double pa = std::clamp(cfg.base_event_rate - cfg.rate_gain * effect, 0.0, 0.45);
    double u = rng.uniform();
    bool home_side;
    if (u < ph) {
      home_side = true;
    } else if (u < ph + pa) {
      home_side = false;
    } else {
      return;
    }
    int pts = rng.uniform() < 0.7 ? 2 : 3;
    if (home_side) {
      home_score += pts;
    } else {
      away_score += pts;
    }
    GameEvent ev = make(period, elapsed, EventKind::Score);
    ev.side = home_side ? TeamSide::Home : TeamSide::Away;
    ev.points = pts;
    events.push_back(std::move(ev));
  }

  std::vector<GameEvent> run() {
    on_home = pick_lineup();
    on_away = pick_lineup();
    recompute_effect();

    // Substitution renewal over regulation, extended per overtime below.
    double sub_rate = std::max(0.0, cfg.shifts_per_game - 4.0) / 2880.0;
    if (cfg.roster_size == 5) sub_rate = 0.0;
    std::set<int> sub_times;
    double t_next = 0.0;
    auto extend_subs = [&](int span_end) {
      if (sub_rate <= 0.0) return;
      while (true) {
        double u = rng.uniform();
        t_next += -std::log1p(-u) / sub_rate;
        if (t_next >= span_end) break;
        int ti = static_cast<int>(std::llround(t_next));
        if (ti <= 0 || ti >= span_end || ti % 720 == 0 || (ti > 2880 && (ti - 2880) % 300 == 0)) {
          continue;
        }
        sub_times.insert(ti);
      }
      t_next = span_end;  // restart the clock at the span boundary
    };
    extend_subs(2880);

    int period = 0;
    int period_start_sec = 0;
    while (true) {
      ++period;
      int period_end_sec = period <= 4 ? 720 * period : 2880 + 300 * (period - 4);
      if (period > 4) extend_subs(period_end_sec);

      events.push_back(make(period, period_start_sec, EventKind::PeriodStart));
      if (period == 1) {
        for (int s : on_home) {
          GameEvent ev = make(1, 0, EventKind::Substitution);
          ev.side = TeamSide::Home;
          ev.player_in = sim_player_id(home, s);
          events.push_back(std::move(ev));
        }
        for (int s : on_away) {
          GameEvent ev = make(1, 0, EventKind::Substitution);
          ev.side = TeamSide::Away;
          ev.player_in = sim_player_id(away, s);
          events.push_back(std::move(ev));
        }
      }

      for (int t = period_start_sec; t < period_end_sec; ++t) {
        if (sub_times.count(t) != 0) {
          bool side = rng.uniform_int(2) == 0;
          swap_player(period, t, side);
          if (rng.uniform() < 0.2) swap_player(period, t, !side);
        }
        maybe_score(period, t);
      }

      events.push_back(make(period, period_end_sec, EventKind::PeriodEnd));
      period_start_sec = period_end_sec;
      if (period >= 4 && home_score != away_score) break;
    }

    events.push_back(make(period, period_start_sec, EventKind::GameEnd));
    return std::move(events);
  }
};

}  // namespace

std::string sim_team_id(int team) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "T%02d", team + 1);
  return buf;
}

std::string sim_player_id(int team, int slot) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02d_P%02d", team + 1, slot + 1);
  return buf;
}

SimResult generate_season(const SimConfig& config) {
  if (config.n_teams < 2) throw ValidationError("generate_season: need at least two teams");
  if (config.roster_size < 5) throw ValidationError("generate_season: roster_size must be >= 5");
  if (config.n_games < 1) throw ValidationError("generate_season: need at least one game");
  if (config.shifts_per_game < 4.0) {
    throw ValidationError("generate_season: shifts_per_game must be >= 4");
  }
  if (!(config.base_event_rate > 0.0) || config.rate_gain < 0.0) {
    throw ValidationError("generate_season: bad scoring parameters");
  }

  std::vector<std::vector<double>> theta(static_cast<std::size_t>(config.n_teams));
  std::vector<double> tau(static_cast<std::size_t>(config.n_teams));
  SimResult result;
  result.truth.mu = config.mu_true;
  result.truth.sigma = config.sigma_true;
  for (int team = 0; team < config.n_teams; ++team) {
    tau[static_cast<std::size_t>(team)] = (team % 2 == 0 ? 1.0 : -1.0) * config.tau_magnitude;
    result.truth.coefficients[team_col_name(sim_team_id(team))] =
        tau[static_cast<std::size_t>(team)];
    auto& row = theta[static_cast<std::size_t>(team)];
    row.resize(static_cast<std::size_t>(config.roster_size));
    for (int slot = 0; slot < config.roster_size; ++slot) {
      double v = (slot % 2 == 0 ? 1.0 : -1.0) * config.theta_magnitude;
      std::string id = sim_player_id(team, slot);
      auto it = config.theta_overrides.find(id);
      if (it != config.theta_overrides.end()) v = it->second;
      row[static_cast<std::size_t>(slot)] = v;
      result.truth.coefficients[player_col_name(id)] = v;
    }
  }

  for (int g = 0; g < config.n_games; ++g) {
    Rng game_rng(derive_seed(config.seed, "game:" + std::to_string(g)));
    int home = game_rng.uniform_int(config.n_teams);
    int away = home;
    while (away == home) away = game_rng.uniform_int(config.n_teams);

    GameSim sim{config, theta, tau, home, away, std::move(game_rng), {}, {}, 0, 0, 0.0, {}, {}};
    std::string game_id = "G" + std::to_string(g + 1);
    sim.proto.game_id = game_id;
    sim.proto.date = date_plus_days(config.start_date, g * 150 / config.n_games);
    sim.proto.home_team = sim_team_id(home);
    sim.proto.away_team = sim_team_id(away);
    // Every generated game goes through the same validation as parsed input.
    result.logs.push_back(make_game_log(game_id, sim.run()));
  }
  return result;
}

void save_truth_csv(const TruthRecord& truth, const std::string& path) {
  auto out = open_output(path);
  out << "coefficient,value\n";
  out << "mu," << fmt_double(truth.mu) << '\n';
  out << "sigma," << fmt_double(truth.sigma) << '\n';
  for (const auto& [name, value] : truth.coefficients) {
    out << name << ',' << fmt_double(value) << '\n';
  }
}

TruthRecord load_truth_csv(const std::string& path) {
  CsvReader reader(path);
  require_header(reader, {"coefficient", "value"});
  TruthRecord truth;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string where = path + ":" + std::to_string(reader.line_no());
    double v = parse_double(f[1], where);
    if (f[0] == "mu") {
      truth.mu = v;
    } else if (f[0] == "sigma") {
      truth.sigma = v;
    } else {
      truth.coefficients[f[0]] = v;
    }
  }
  return truth;
}

}  // namespace winshift
