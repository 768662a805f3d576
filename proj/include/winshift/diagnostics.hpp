#pragma once

#include <span>
#include <string>
#include <vector>

#include "winshift/blasso.hpp"
#include "winshift/dataset.hpp"
#include "winshift/shifts.hpp"

namespace winshift {

// Model-checking toolkit: response transformations, autocorrelation,
// residuals against fitted values, normal quantile data, binned
// heteroscedasticity summaries and the reweighting schemes.

enum class ResponseTag { y1, y2, y3, y4, y5, y6 };

const char* to_string(ResponseTag tag);

struct ResponseVariant {
  ResponseTag tag = ResponseTag::y1;
  std::vector<double> values;
  std::vector<double> weights;  // y4..y6 only
  double target_sd = 0.0;       // y4..y6 only
};

// Sample autocorrelations at lags 1..max_lag.
std::vector<double> acf(std::span<const double> series, int max_lag);

// y1: the raw change in win probability. y2: change in the log odds of
// winning, with endpoint probabilities clamped to [1e-6, 1-1e-6] first.
// y3: inverse-logit of the shifted, rescaled change, 1/(1+exp(-(1+y1)/2)).
ResponseVariant transform_response(const std::vector<Shift>& annotated_shifts, ResponseTag tag);

struct BinnedSd {
  std::vector<double> edges;
  std::vector<int> counts;
  std::vector<double> sds;       // NaN where a bin has fewer than two rows
  std::vector<int> sparse_bins;  // indices of occupied bins with < 2 rows
};

// Sample standard deviation of the responses within each starting
// win-probability bin. Bins are [e_k, e_{k+1}), last bin right-closed.
BinnedSd binned_sd(std::span<const double> responses, std::span<const double> start_wps,
                   const std::vector<double>& edges);

// Ten equal bins on [0, 1].
std::vector<double> default_bin_edges(int bins = 10);

struct ReweightResult {
  RegressionDataset dataset;
  std::vector<double> weights;
  double target_sd = 0.0;
};

// Scales every row (response and predictors) by target_sd / sd(bin of its
// starting win probability) so the recomputed binned standard deviations
// all equal the target. Targets 1, 0.03 and 0.12 give the y4, y5 and y6
// schemes.
ReweightResult reweight_dataset(const RegressionDataset& data, const std::vector<double>& edges,
                                double target_sd);

struct ResidualSet {
  std::vector<double> fitted;     // posterior-mean conditional expectations
  std::vector<double> residuals;  // response - fitted
};

ResidualSet residual_diagnostics(const RegressionDataset& data, const PosteriorDraws& draws);

struct QqData {
  std::vector<double> normal_q;     // standard normal quantiles at (k-0.5)/n
  std::vector<double> raw;          // sorted residuals
  std::vector<double> studentized;  // sorted residuals over their sample SD
};

QqData qq_data(const std::vector<double>& residuals);

struct Histogram {
  std::vector<double> edges;
  std::vector<int> counts;
};

Histogram histogram(std::span<const double> values, int bins);

}  // namespace winshift
