#include "winshift/shifts.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "winshift/csv.hpp"
#include "winshift/errors.hpp"

namespace winshift {

std::vector<Shift> segment_shifts(const GameLog& log) {
  // Boundary seconds: game start and end, period ends, substitution times.
  std::set<int> boundaries = {0, log.total_sec};
  for (int t : log.period_end_secs) {
    if (t > 0 && t <= log.total_sec) boundaries.insert(t);
  }
  std::map<int, std::vector<const GameEvent*>> subs_at;
  for (const auto& ev : log.events) {
    if (ev.kind != EventKind::Substitution) continue;
    if (ev.elapsed_sec == 0 && ev.player_out.empty()) continue;  // starter declaration
    boundaries.insert(ev.elapsed_sec);
    subs_at[ev.elapsed_sec].push_back(&ev);
  }

  std::vector<int> cuts(boundaries.begin(), boundaries.end());
  std::set<std::string> on_home(log.home_starters.begin(), log.home_starters.end());
  std::set<std::string> on_away(log.away_starters.begin(), log.away_starters.end());
  auto lead = lead_by_second(log);

  std::vector<Shift> shifts;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    int start = cuts[k];
    int end = cuts[k + 1];
    // Substitutions recorded at the boundary apply to the interval that
    // starts there.
    auto it = subs_at.find(start);
    if (it != subs_at.end()) {
      for (const GameEvent* ev : it->second) {
        auto& court = (ev->side == TeamSide::Home) ? on_home : on_away;
        court.erase(ev->player_out);
        court.insert(ev->player_in);
      }
    }
    Shift s;
    s.game_id = log.game_id;
    s.index = static_cast<int>(shifts.size());
    s.start_sec = start;
    s.end_sec = end;
    s.home_team = log.home_team;
    s.away_team = log.away_team;
    std::copy(on_home.begin(), on_home.end(), s.home_players.begin());
    std::copy(on_away.begin(), on_away.end(), s.away_players.begin());
    s.lead_start = lead[start];
    s.lead_end = lead[end];
    shifts.push_back(std::move(s));
  }
  return shifts;
}

std::vector<Shift> segment_shifts(const std::vector<GameLog>& logs) {
  std::vector<Shift> all;
  for (const auto& log : logs) {
    auto shifts = segment_shifts(log);
    all.insert(all.end(), shifts.begin(), shifts.end());
  }
  return all;
}

void annotate_shifts(std::vector<Shift>& shifts, const WinProbGrid& grid) {
  for (auto& s : shifts) {
    s.wp_start = grid.lookup(s.start_sec, s.lead_start);
    s.wp_end = grid.lookup(s.end_sec, s.lead_end);
    s.y = s.wp_end - s.wp_start;
  }
}

namespace {

const std::vector<std::string> kShiftColumns = {
    "game_id", "idx",   "start_sec", "end_sec",   "home_team", "away_team",
    "h1",      "h2",    "h3",        "h4",        "h5",        "a1",
    "a2",      "a3",    "a4",        "a5",        "lead_start", "lead_end",
    "wp_start", "wp_end", "y"};

}  // namespace

void save_shifts_csv(const std::vector<Shift>& shifts, const std::string& path) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < kShiftColumns.size(); ++i) {
    out << (i ? "," : "") << kShiftColumns[i];
  }
  out << '\n';
  for (const auto& s : shifts) {
    out << s.game_id << ',' << s.index << ',' << s.start_sec << ',' << s.end_sec << ','
        << s.home_team << ',' << s.away_team;
    for (const auto& p : s.home_players) out << ',' << p;
    for (const auto& p : s.away_players) out << ',' << p;
    out << ',' << s.lead_start << ',' << s.lead_end << ',' << fmt_double(s.wp_start) << ','
        << fmt_double(s.wp_end) << ',' << fmt_double(s.y) << '\n';
  }
}

std::vector<Shift> load_shifts_csv(const std::string& path) {
  CsvReader reader(path);
  require_header(reader, kShiftColumns);
  std::vector<Shift> shifts;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string where = path + ":" + std::to_string(reader.line_no());
    Shift s;
    s.game_id = f[0];
    s.index = static_cast<int>(parse_int(f[1], where));
    s.start_sec = static_cast<int>(parse_int(f[2], where));
    s.end_sec = static_cast<int>(parse_int(f[3], where));
    if (s.end_sec <= s.start_sec) throw ValidationError(where + ": empty shift interval");
    s.home_team = f[4];
    s.away_team = f[5];
    for (int i = 0; i < 5; ++i) s.home_players[i] = f[6 + i];
    for (int i = 0; i < 5; ++i) s.away_players[i] = f[11 + i];
    s.lead_start = static_cast<int>(parse_int(f[16], where));
    s.lead_end = static_cast<int>(parse_int(f[17], where));
    s.wp_start = parse_double(f[18], where);
    s.wp_end = parse_double(f[19], where);
    s.y = parse_double(f[20], where);
    shifts.push_back(std::move(s));
  }
  return shifts;
}

}  // namespace winshift
