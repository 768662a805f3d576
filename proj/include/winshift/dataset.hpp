#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "winshift/shifts.hpp"

namespace winshift {

// One regression row per shift: the response y plus the signed indicator
// entries, stored sparse (at most twelve nonzeros per row before any
// reweighting). start_wp is carried for the heteroscedasticity diagnostics;
// it is not part of the exported file format.
struct DatasetRow {
  std::vector<std::pair<std::int32_t, double>> entries;  // (column, value), column-sorted
  double y = 0.0;
  double start_wp = std::numeric_limits<double>::quiet_NaN();
};

struct RegressionDataset {
  std::vector<std::string> col_names;  // "theta:<player>" columns, then "tau:<team>"
  int n_players = 0;
  int n_teams = 0;
  std::map<std::string, int> player_cols;  // player id -> column
  std::map<std::string, int> team_cols;    // team id -> column
  std::vector<DatasetRow> rows;

  int cols() const { return n_players + n_teams; }
  std::size_t n() const { return rows.size(); }
};

std::string player_col_name(const std::string& player_id);
std::string team_col_name(const std::string& team_id);

// Assembles rows from already annotated shifts: +1 for the five home
// players and the home team, -1 for the away side, y from the grid lookups.
RegressionDataset build_dataset(const std::vector<Shift>& annotated_shifts);

// Annotates a copy of the shifts against the grid first.
RegressionDataset build_dataset(std::vector<Shift> shifts, const WinProbGrid& grid);

// Dataset file: CSV with column y followed by one signed column per player
// and one per team.
void save_dataset_csv(const RegressionDataset& data, const std::string& path);
RegressionDataset load_dataset_csv(const std::string& path);

}  // namespace winshift
