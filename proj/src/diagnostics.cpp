#include "winshift/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "winshift/csv.hpp"
#include "winshift/errors.hpp"
#include "winshift/stats.hpp"

namespace winshift {

const char* to_string(ResponseTag tag) {
  switch (tag) {
    case ResponseTag::y1: return "y1";
    case ResponseTag::y2: return "y2";
    case ResponseTag::y3: return "y3";
    case ResponseTag::y4: return "y4";
    case ResponseTag::y5: return "y5";
    case ResponseTag::y6: return "y6";
  }
  return "?";
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
  int n = static_cast<int>(series.size());
  if (max_lag < 1) throw ValidationError("acf: max_lag must be >= 1");
  if (n <= max_lag + 1) throw ValidationError("acf: series too short for requested lags");
  double m = mean(series);
  double denom = 0;
  for (double x : series) denom += (x - m) * (x - m);
  if (!(denom > 0.0)) throw ValidationError("acf: constant series");
  std::vector<double> out(static_cast<std::size_t>(max_lag));
  for (int lag = 1; lag <= max_lag; ++lag) {
    double num = 0;
    for (int t = 0; t + lag < n; ++t) {
      num += (series[static_cast<std::size_t>(t)] - m) *
             (series[static_cast<std::size_t>(t + lag)] - m);
    }
    out[static_cast<std::size_t>(lag - 1)] = num / denom;
  }
  return out;
}

namespace {

double clamped_logit(double p) {
  const double eps = 1e-6;
  return logit(std::min(1.0 - eps, std::max(eps, p)));
}

}  // namespace

ResponseVariant transform_response(const std::vector<Shift>& shifts, ResponseTag tag) {
  ResponseVariant out;
  out.tag = tag;
  out.values.reserve(shifts.size());
  for (const auto& s : shifts) {
    if (!std::isfinite(s.y)) {
      throw ValidationError("transform_response: shifts missing win-probability annotation");
    }
    switch (tag) {
      case ResponseTag::y1:
        out.values.push_back(s.y);
        break;
      case ResponseTag::y2:
        out.values.push_back(clamped_logit(s.wp_end) - clamped_logit(s.wp_start));
        break;
      case ResponseTag::y3:
        out.values.push_back(1.0 / (1.0 + std::exp(-(1.0 + s.y) / 2.0)));
        break;
      default:
        throw ValidationError("transform_response handles y1..y3; y4..y6 come from reweighting");
    }
  }
  return out;
}

std::vector<double> default_bin_edges(int bins) {
  if (bins < 1) throw ValidationError("default_bin_edges: bins must be >= 1");
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    edges[static_cast<std::size_t>(i)] = static_cast<double>(i) / bins;
  }
  return edges;
}

namespace {

int bin_of(double wp, const std::vector<double>& edges) {
  if (wp < edges.front() || wp > edges.back()) return -1;
  if (wp == edges.back()) return static_cast<int>(edges.size()) - 2;
  auto it = std::upper_bound(edges.begin(), edges.end(), wp);
  return static_cast<int>(it - edges.begin()) - 1;
}

}  // namespace

BinnedSd binned_sd(std::span<const double> responses, std::span<const double> start_wps,
                   const std::vector<double>& edges) {
  if (responses.size() != start_wps.size()) {
    throw ValidationError("binned_sd: responses and start_wps differ in length");
  }
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw ValidationError("binned_sd: bin edges must be sorted with at least two values");
  }
  std::size_t bins = edges.size() - 1;
  std::vector<std::vector<double>> members(bins);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    int b = bin_of(start_wps[i], edges);
    if (b < 0) {
      throw ValidationError("binned_sd: start_wp " + fmt_double(start_wps[i]) +
                            " outside the bin range");
    }
    members[static_cast<std::size_t>(b)].push_back(responses[i]);
  }
  BinnedSd out;
  out.edges = edges;
  out.counts.resize(bins);
  out.sds.assign(bins, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t b = 0; b < bins; ++b) {
    out.counts[b] = static_cast<int>(members[b].size());
    if (members[b].size() >= 2) {
      out.sds[b] = sample_sd(members[b]);
    } else if (!members[b].empty()) {
      out.sparse_bins.push_back(static_cast<int>(b));
    }
  }
  return out;
}

ReweightResult reweight_dataset(const RegressionDataset& data, const std::vector<double>& edges,
                                double target_sd) {
  if (!(target_sd > 0.0)) throw ValidationError("reweight_dataset: target_sd must be positive");
  std::vector<double> ys, wps;
  ys.reserve(data.rows.size());
  wps.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    if (!std::isfinite(row.start_wp)) {
      throw ValidationError("reweight_dataset: rows missing start_wp");
    }
    ys.push_back(row.y);
    wps.push_back(row.start_wp);
  }
  BinnedSd sds = binned_sd(ys, wps, edges);
  if (!sds.sparse_bins.empty()) {
    throw ValidationError("reweight_dataset: bin " + std::to_string(sds.sparse_bins.front()) +
                          " has fewer than two rows");
  }

  ReweightResult out;
  out.dataset = data;
  out.target_sd = target_sd;
  out.weights.resize(data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    int b = bin_of(wps[i], edges);
    double sd = sds.sds[static_cast<std::size_t>(b)];
    if (!(sd > 0.0)) {
      throw NumericalError("reweight_dataset: zero standard deviation in bin " + std::to_string(b));
    }
    double w = target_sd / sd;
    out.weights[i] = w;
    auto& row = out.dataset.rows[i];
    row.y *= w;
    for (auto& [col, v] : row.entries) v *= w;
  }
  return out;
}

ResidualSet residual_diagnostics(const RegressionDataset& data, const PosteriorDraws& draws) {
  if (static_cast<int>(data.col_names.size()) != draws.n_coefs() ||
      data.col_names != draws.coef_names) {
    throw ValidationError("residual_diagnostics: dataset and draws columns do not match");
  }
  // The average over draws of mu + x^T beta is linear, so the posterior
  // means suffice.
  double mu_bar = mean(draws.mu);
  std::vector<double> beta_bar(static_cast<std::size_t>(draws.n_coefs()), 0.0);
  for (int j = 0; j < draws.n_coefs(); ++j) {
    double s = 0;
    for (int d = 0; d < draws.n_draws(); ++d) s += draws.coef(d, j);
    beta_bar[static_cast<std::size_t>(j)] = s / draws.n_draws();
  }
  ResidualSet out;
  out.fitted.reserve(data.rows.size());
  out.residuals.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    double fit = mu_bar;
    for (const auto& [col, v] : row.entries) fit += v * beta_bar[static_cast<std::size_t>(col)];
    out.fitted.push_back(fit);
    out.residuals.push_back(row.y - fit);
  }
  return out;
}

QqData qq_data(const std::vector<double>& residuals) {
  if (residuals.size() < 2) throw ValidationError("qq_data: need at least two residuals");
  QqData out;
  out.raw = residuals;
  std::sort(out.raw.begin(), out.raw.end());
  std::size_t n = out.raw.size();
  double sd = sample_sd(out.raw);
  out.normal_q.resize(n);
  out.studentized.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.normal_q[k] = norm_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(n));
    out.studentized[k] = sd > 0.0 ? out.raw[k] / sd : 0.0;
  }
  return out;
}

Histogram histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw ValidationError("histogram: no values");
  if (bins < 1) throw ValidationError("histogram: bins must be >= 1");
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (int i = 0; i <= bins; ++i) {
    h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  }
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    if (b == bins) b = bins - 1;
    h.counts[static_cast<std::size_t>(b)] += 1;
  }
  return h;
}

}  // namespace winshift
