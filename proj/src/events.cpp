#include "winshift/events.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "winshift/csv.hpp"
#include "winshift/errors.hpp"

namespace winshift {

namespace {

const std::vector<std::string> kEventColumns = {
    "game_id", "date",       "period",     "elapsed_sec", "event_kind",
    "team_side", "player_in", "player_out", "points",      "home_score",
    "away_score", "home_team", "away_team"};

EventKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "period_start") return EventKind::PeriodStart;
  if (s == "period_end") return EventKind::PeriodEnd;
  if (s == "substitution") return EventKind::Substitution;
  if (s == "score") return EventKind::Score;
  if (s == "game_end") return EventKind::GameEnd;
  throw ValidationError(where + ": unknown event_kind '" + s + "'");
}

TeamSide parse_side(const std::string& s, const std::string& where) {
  if (s == "home") return TeamSide::Home;
  if (s == "away") return TeamSide::Away;
  if (s == "none" || s.empty()) return TeamSide::None;
  throw ValidationError(where + ": unknown team_side '" + s + "'");
}

void check_date(const std::string& date, const std::string& where) {
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') {
    throw ValidationError(where + ": date must be YYYY-MM-DD, got '" + date + "'");
  }
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (date[i] < '0' || date[i] > '9') {
      throw ValidationError(where + ": date must be YYYY-MM-DD, got '" + date + "'");
    }
  }
}

// Replays the event stream of one game, enforcing the invariants, and
// fills in the derived GameLog fields.
GameLog validate_game(const std::string& game_id, std::vector<GameEvent> events) {
  GameLog log;
  log.game_id = game_id;
  const std::string where = "game " + game_id;
  if (events.empty()) throw ValidationError(where + ": no events");

  log.date = events.front().date;
  log.home_team = events.front().home_team;
  log.away_team = events.front().away_team;
  if (log.home_team.empty() || log.away_team.empty() || log.home_team == log.away_team) {
    throw ValidationError(where + ": bad team ids");
  }

  std::set<std::string> on_home, on_away;
  int clock = 0;
  int home_score = 0, away_score = 0;
  bool ended = false;

  for (const auto& ev : events) {
    if (ended) throw ValidationError(where + ": event after game_end");
    if (ev.home_team != log.home_team || ev.away_team != log.away_team) {
      throw ValidationError(where + ": inconsistent team ids across events");
    }
    if (ev.period < 1) throw ValidationError(where + ": period must be >= 1");
    if (ev.elapsed_sec < clock) {
      throw ValidationError(where + ": non-monotone clock at elapsed_sec " +
                            std::to_string(ev.elapsed_sec));
    }
    clock = ev.elapsed_sec;

    if (ev.kind == EventKind::Score) {
      if (ev.side == TeamSide::None) throw ValidationError(where + ": score without team_side");
      if (ev.points < 0) throw ValidationError(where + ": negative points");
      int want_home = home_score + (ev.side == TeamSide::Home ? ev.points : 0);
      int want_away = away_score + (ev.side == TeamSide::Away ? ev.points : 0);
      if (ev.home_score != want_home || ev.away_score != want_away) {
        throw ValidationError(where + ": running score mismatch at elapsed_sec " +
                              std::to_string(ev.elapsed_sec));
      }
      home_score = want_home;
      away_score = want_away;
    } else {
      if (ev.home_score != home_score || ev.away_score != away_score) {
        throw ValidationError(where + ": running score changed on non-score event at elapsed_sec " +
                              std::to_string(ev.elapsed_sec));
      }
    }

    if (ev.kind == EventKind::Substitution) {
      if (ev.side == TeamSide::None) {
        throw ValidationError(where + ": substitution without team_side");
      }
      auto& court = (ev.side == TeamSide::Home) ? on_home : on_away;
      auto& starters = (ev.side == TeamSide::Home) ? log.home_starters : log.away_starters;
      if (ev.elapsed_sec == 0 && ev.player_out.empty()) {
        if (ev.player_in.empty()) throw ValidationError(where + ": starter without player_in");
        if (!court.insert(ev.player_in).second) {
          throw ValidationError(where + ": duplicate starter " + ev.player_in);
        }
        if (court.size() > 5) throw ValidationError(where + ": more than five starters per side");
        starters.push_back(ev.player_in);
      } else {
        if (ev.player_in.empty() || ev.player_out.empty()) {
          throw ValidationError(where + ": substitution needs player_in and player_out");
        }
        if (court.size() != 5) {
          throw ValidationError(where + ": substitution before starters complete");
        }
        if (court.count(ev.player_out) == 0) {
          throw ValidationError(where + ": player_out not on court (" + ev.player_out + ")");
        }
        if (court.count(ev.player_in) != 0) {
          throw ValidationError(where + ": player_in already on court (" + ev.player_in + ")");
        }
        court.erase(ev.player_out);
        court.insert(ev.player_in);
      }
    }

    if (ev.kind == EventKind::PeriodEnd) log.period_end_secs.push_back(ev.elapsed_sec);
    if (ev.kind == EventKind::GameEnd) {
      ended = true;
      log.total_sec = ev.elapsed_sec;
    }
  }

  if (!ended) throw ValidationError(where + ": missing game_end event");
  if (log.total_sec <= 0) throw ValidationError(where + ": game_end at elapsed_sec 0");
  if (log.home_starters.size() != 5 || log.away_starters.size() != 5) {
    throw ValidationError(where + ": lineup inconsistency, expected 5 starters per side");
  }
  if (home_score == away_score) {
    throw ValidationError(where + ": tied final score " + std::to_string(home_score));
  }
  log.home_won = home_score > away_score;
  if (log.period_end_secs.empty() || log.period_end_secs.back() != log.total_sec) {
    log.period_end_secs.push_back(log.total_sec);
  }
  std::sort(log.home_starters.begin(), log.home_starters.end());
  std::sort(log.away_starters.begin(), log.away_starters.end());
  log.events = std::move(events);
  return log;
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PeriodStart: return "period_start";
    case EventKind::PeriodEnd: return "period_end";
    case EventKind::Substitution: return "substitution";
    case EventKind::Score: return "score";
    case EventKind::GameEnd: return "game_end";
  }
  return "?";
}

const char* to_string(TeamSide side) {
  switch (side) {
    case TeamSide::Home: return "home";
    case TeamSide::Away: return "away";
    case TeamSide::None: return "none";
  }
  return "?";
}

GameLog make_game_log(const std::string& game_id, std::vector<GameEvent> events) {
  return validate_game(game_id, std::move(events));
}

std::vector<GameLog> parse_events(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(source_name + ": empty input");
  if (split_csv_line(line) != kEventColumns) {
    throw ValidationError(source_name + ": unexpected event CSV header");
  }

  std::vector<std::string> game_order;
  std::map<std::string, std::vector<GameEvent>> by_game;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    auto f = split_csv_line(line);
    if (f.size() != kEventColumns.size()) {
      throw ValidationError(where + ": malformed row, expected " +
                            std::to_string(kEventColumns.size()) + " fields");
    }
    GameEvent ev;
    ev.game_id = f[0];
    ev.date = f[1];
    check_date(ev.date, where);
    ev.period = static_cast<int>(parse_int(f[2], where));
    ev.elapsed_sec = static_cast<int>(parse_int(f[3], where));
    if (ev.elapsed_sec < 0) throw ValidationError(where + ": negative elapsed_sec");
    ev.kind = parse_kind(f[4], where);
    ev.side = parse_side(f[5], where);
    ev.player_in = f[6];
    ev.player_out = f[7];
    ev.points = static_cast<int>(parse_int(f[8], where));
    ev.home_score = static_cast<int>(parse_int(f[9], where));
    ev.away_score = static_cast<int>(parse_int(f[10], where));
    if (ev.home_score < 0 || ev.away_score < 0) {
      throw ValidationError(where + ": negative running score");
    }
    ev.home_team = f[11];
    ev.away_team = f[12];
    if (ev.game_id.empty()) throw ValidationError(where + ": empty game_id");
    if (by_game.find(ev.game_id) == by_game.end()) game_order.push_back(ev.game_id);
    by_game[ev.game_id].push_back(std::move(ev));
  }

  std::vector<GameLog> logs;
  logs.reserve(game_order.size());
  for (const auto& id : game_order) {
    logs.push_back(validate_game(id, std::move(by_game[id])));
  }
  return logs;
}

std::vector<GameLog> parse_events_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return parse_events(in, path);
}

void save_events_csv(const std::vector<GameLog>& logs, const std::string& path) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < kEventColumns.size(); ++i) {
    out << (i ? "," : "") << kEventColumns[i];
  }
  out << '\n';
  for (const auto& log : logs) {
    for (const auto& ev : log.events) {
      out << ev.game_id << ',' << ev.date << ',' << ev.period << ',' << ev.elapsed_sec << ','
          << to_string(ev.kind) << ',' << to_string(ev.side) << ',' << ev.player_in << ','
          << ev.player_out << ',' << ev.points << ',' << ev.home_score << ',' << ev.away_score
          << ',' << ev.home_team << ',' << ev.away_team << '\n';
    }
  }
}

std::vector<int> lead_by_second(const GameLog& log) {
  std::vector<int> lead(static_cast<std::size_t>(log.total_sec) + 1, 0);
  int current = 0;
  std::size_t next = 0;
  // Events are clock-ordered; fold score changes in as t passes them.
  for (int t = 0; t <= log.total_sec; ++t) {
    while (next < log.events.size() && log.events[next].elapsed_sec <= t) {
      const auto& ev = log.events[next];
      if (ev.kind == EventKind::Score) current = ev.home_score - ev.away_score;
      ++next;
    }
    lead[static_cast<std::size_t>(t)] = current;
  }
  return lead;
}

int season_of(const std::string& date) {
  check_date(date, "season_of");
  int year = std::stoi(date.substr(0, 4));
  int month = std::stoi(date.substr(5, 2));
  return month >= 8 ? year : year - 1;
}

}  // namespace winshift
