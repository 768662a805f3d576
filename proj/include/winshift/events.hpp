#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace winshift {

// Event stream for one game, reconstructed and validated from the event CSV.
//
// CSV columns, in order:
//   game_id, date, period, elapsed_sec, event_kind, team_side, player_in,
//   player_out, points, home_score, away_score, home_team, away_team
//
// event_kind is one of period_start, period_end, substitution, score,
// game_end. Starters are declared through ten substitution events at
// elapsed_sec = 0 with an empty player_out.

enum class EventKind { PeriodStart, PeriodEnd, Substitution, Score, GameEnd };
enum class TeamSide { Home, Away, None };

const char* to_string(EventKind kind);
const char* to_string(TeamSide side);

struct GameEvent {
  std::string game_id;
  std::string date;  // YYYY-MM-DD
  int period = 1;
  int elapsed_sec = 0;
  EventKind kind = EventKind::Score;
  TeamSide side = TeamSide::None;
  std::string player_in;
  std::string player_out;
  int points = 0;
  int home_score = 0;
  int away_score = 0;
  std::string home_team;
  std::string away_team;
};

struct GameLog {
  std::string game_id;
  std::string date;
  std::string home_team;
  std::string away_team;
  std::vector<GameEvent> events;
  std::vector<std::string> home_starters;  // exactly 5
  std::vector<std::string> away_starters;  // exactly 5
  bool home_won = false;
  int total_sec = 0;
  std::vector<int> period_end_secs;  // ascending; the last equals total_sec
};

// Parses and validates the event stream. Multiple game_ids may interleave;
// one GameLog is returned per game_id in order of first appearance.
// Throws ValidationError with the offending line number on malformed rows
// and with the game id on invariant violations.
std::vector<GameLog> parse_events(std::istream& in, const std::string& source_name);
std::vector<GameLog> parse_events_file(const std::string& path);

// Replays one game's events through the full validation, filling in the
// derived GameLog fields. The events must be clock-ordered.
GameLog make_game_log(const std::string& game_id, std::vector<GameEvent> events);

void save_events_csv(const std::vector<GameLog>& logs, const std::string& path);

// Home lead (home - away) at each second t in [0, total_sec]; a score at
// elapsed t is reflected from index t onward.
std::vector<int> lead_by_second(const GameLog& log);

// Season start year: August through December belong to the season of that
// year, January through July to the season of the previous year.
int season_of(const std::string& date);

}  // namespace winshift
