#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "winshift/events.hpp"
#include "winshift/wpgrid.hpp"

namespace winshift {

// A maximal interval with a fixed set of ten players. Boundaries fall at
// substitutions and at period boundaries; simultaneous substitutions at the
// same second collapse into a single boundary and zero-length intervals are
// dropped. wp_start, wp_end and y stay NaN until annotate_shifts runs a
// grid over the shift endpoints.
struct Shift {
  std::string game_id;
  int index = 0;
  int start_sec = 0;
  int end_sec = 0;
  std::string home_team;
  std::string away_team;
  std::array<std::string, 5> home_players;
  std::array<std::string, 5> away_players;
  int lead_start = 0;
  int lead_end = 0;
  double wp_start = std::numeric_limits<double>::quiet_NaN();
  double wp_end = std::numeric_limits<double>::quiet_NaN();
  double y = std::numeric_limits<double>::quiet_NaN();

  int duration() const { return end_sec - start_sec; }
};

std::vector<Shift> segment_shifts(const GameLog& log);
std::vector<Shift> segment_shifts(const std::vector<GameLog>& logs);

// Fills wp_start, wp_end and y = wp_end - wp_start from the grid. Both
// endpoints query the same state function, so per game the y values
// telescope to wp(end state) - wp(start state).
void annotate_shifts(std::vector<Shift>& shifts, const WinProbGrid& grid);

void save_shifts_csv(const std::vector<Shift>& shifts, const std::string& path);
std::vector<Shift> load_shifts_csv(const std::string& path);

}  // namespace winshift
