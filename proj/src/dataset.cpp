#include "winshift/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "winshift/csv.hpp"
#include "winshift/errors.hpp"

namespace winshift {

std::string player_col_name(const std::string& player_id) { return "theta:" + player_id; }
std::string team_col_name(const std::string& team_id) { return "tau:" + team_id; }

RegressionDataset build_dataset(const std::vector<Shift>& annotated_shifts) {
  if (annotated_shifts.empty()) throw ValidationError("build_dataset: empty shift list");

  std::set<std::string> players, teams;
  for (const auto& s : annotated_shifts) {
    if (!std::isfinite(s.y)) {
      throw ValidationError("build_dataset: shift without win-probability annotation (game " +
                            s.game_id + ")");
    }
    for (const auto& p : s.home_players) players.insert(p);
    for (const auto& p : s.away_players) players.insert(p);
    teams.insert(s.home_team);
    teams.insert(s.away_team);
  }

  RegressionDataset data;
  data.n_players = static_cast<int>(players.size());
  data.n_teams = static_cast<int>(teams.size());
  for (const auto& p : players) {
    data.player_cols[p] = static_cast<int>(data.col_names.size());
    data.col_names.push_back(player_col_name(p));
  }
  for (const auto& t : teams) {
    data.team_cols[t] = static_cast<int>(data.col_names.size());
    data.col_names.push_back(team_col_name(t));
  }

  data.rows.reserve(annotated_shifts.size());
  for (const auto& s : annotated_shifts) {
    DatasetRow row;
    row.y = s.y;
    row.start_wp = s.wp_start;
    row.entries.reserve(12);
    for (const auto& p : s.home_players) row.entries.emplace_back(data.player_cols.at(p), 1.0);
    for (const auto& p : s.away_players) row.entries.emplace_back(data.player_cols.at(p), -1.0);
    row.entries.emplace_back(data.team_cols.at(s.home_team), 1.0);
    row.entries.emplace_back(data.team_cols.at(s.away_team), -1.0);
    std::sort(row.entries.begin(), row.entries.end());
    data.rows.push_back(std::move(row));
  }
  return data;
}

RegressionDataset build_dataset(std::vector<Shift> shifts, const WinProbGrid& grid) {
  annotate_shifts(shifts, grid);
  return build_dataset(shifts);
}

void save_dataset_csv(const RegressionDataset& data, const std::string& path) {
  auto out = open_output(path);
  out << 'y';
  for (const auto& name : data.col_names) out << ',' << name;
  out << '\n';
  std::vector<double> dense(static_cast<std::size_t>(data.cols()), 0.0);
  for (const auto& row : data.rows) {
    std::fill(dense.begin(), dense.end(), 0.0);
    for (const auto& [col, v] : row.entries) dense[static_cast<std::size_t>(col)] = v;
    out << fmt_double(row.y);
    for (double v : dense) out << ',' << fmt_double(v);
    out << '\n';
  }
}

RegressionDataset load_dataset_csv(const std::string& path) {
  CsvReader reader(path);
  const auto& header = reader.header();
  if (header.empty() || header[0] != "y") {
    throw ValidationError(path + ": dataset header must start with 'y'");
  }
  RegressionDataset data;
  bool seen_team = false;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string& name = header[i];
    int col = static_cast<int>(i - 1);
    if (name.rfind("theta:", 0) == 0) {
      if (seen_team) throw ValidationError(path + ": player column after team columns");
      data.player_cols[name.substr(6)] = col;
      ++data.n_players;
    } else if (name.rfind("tau:", 0) == 0) {
      seen_team = true;
      data.team_cols[name.substr(4)] = col;
      ++data.n_teams;
    } else {
      throw ValidationError(path + ": unknown column '" + name + "'");
    }
    data.col_names.push_back(name);
  }

  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string where = path + ":" + std::to_string(reader.line_no());
    DatasetRow row;
    row.y = parse_double(f[0], where);
    for (std::size_t i = 1; i < f.size(); ++i) {
      double v = parse_double(f[i], where);
      if (v != 0.0) row.entries.emplace_back(static_cast<std::int32_t>(i - 1), v);
    }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) throw ValidationError(path + ": dataset has no rows");
  return data;
}

}  // namespace winshift
