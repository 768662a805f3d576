#include "winshift/blasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "winshift/csv.hpp"
#include "winshift/errors.hpp"
#include "winshift/stats.hpp"

namespace winshift {

int PosteriorDraws::col_of(const std::string& name) const {
  if (index_.empty()) {
    for (std::size_t i = 0; i < coef_names.size(); ++i) {
      index_.emplace(coef_names[i], static_cast<int>(i));
    }
  }
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown coefficient '" + name + "'");
  return it->second;
}

std::vector<double> PosteriorDraws::coef_column(int col) const {
  std::vector<double> out(static_cast<std::size_t>(n_draws()));
  for (int s = 0; s < n_draws(); ++s) out[static_cast<std::size_t>(s)] = coef(s, col);
  return out;
}

GibbsSampler::GibbsSampler(const RegressionDataset& data, const SamplerConfig& cfg) : cfg_(cfg) {
  if (data.rows.empty()) throw ValidationError("gibbs sampler: empty dataset");
  if (data.rows.size() < 2) throw ValidationError("gibbs sampler: need n > 1 rows");
  if (data.cols() < 1) throw ValidationError("gibbs sampler: no coefficients");
  if (!(cfg.r > 0.0) || !(cfg.delta > 0.0)) {
    throw ValidationError("gibbs sampler: hyperprior r and delta must be positive");
  }
  if (cfg.n_keep < 1 || cfg.thin < 1 || cfg.burn_in < 0) {
    throw ValidationError("gibbs sampler: bad schedule");
  }
  n_ = static_cast<int>(data.rows.size());
  p_ = data.cols();

  // Canonical column order: sort by name. Canonical signs: flip each column
  // so its first nonzero entry is positive, and y likewise.
  std::vector<int> order(static_cast<std::size_t>(p_));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return data.col_names[static_cast<std::size_t>(a)] < data.col_names[static_cast<std::size_t>(b)];
  });
  canon_of_orig_.assign(static_cast<std::size_t>(p_), 0);
  for (int pos = 0; pos < p_; ++pos) canon_of_orig_[static_cast<std::size_t>(order[pos])] = pos;

  col_sign_.assign(static_cast<std::size_t>(p_), 0.0);
  for (const auto& row : data.rows) {
    for (const auto& [col, v] : row.entries) {
      auto& sgn = col_sign_[static_cast<std::size_t>(col)];
      if (sgn == 0.0 && v != 0.0) sgn = v > 0.0 ? 1.0 : -1.0;
    }
  }
  for (auto& sgn : col_sign_) {
    if (sgn == 0.0) sgn = 1.0;
  }
  y_sign_ = 1.0;
  for (const auto& row : data.rows) {
    if (row.y != 0.0) {
      y_sign_ = row.y > 0.0 ? 1.0 : -1.0;
      break;
    }
  }

  rows_.reserve(data.rows.size());
  y_.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    std::vector<std::pair<std::int32_t, double>> entries;
    entries.reserve(row.entries.size());
    for (const auto& [col, v] : row.entries) {
      entries.emplace_back(canon_of_orig_[static_cast<std::size_t>(col)],
                           col_sign_[static_cast<std::size_t>(col)] * v);
    }
    std::sort(entries.begin(), entries.end());
    rows_.push_back(std::move(entries));
    double y = y_sign_ * row.y;
    if (!std::isfinite(y)) throw ValidationError("gibbs sampler: non-finite response");
    y_.push_back(y);
  }

  col_mean_.assign(static_cast<std::size_t>(p_), 0.0);
  for (const auto& row : rows_) {
    for (const auto& [col, v] : row) col_mean_[static_cast<std::size_t>(col)] += v;
  }
  for (auto& m : col_mean_) m /= static_cast<double>(n_);
  y_mean_ = mean(y_);

  // Cross-products accumulated once from the sparse rows, then centered.
  xtx_ = Matrix(p_, p_);
  xty_.assign(static_cast<std::size_t>(p_), 0.0);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (const auto& [a, va] : rows_[i]) {
      xty_[static_cast<std::size_t>(a)] += va * y_[i];
      for (const auto& [b, vb] : rows_[i]) xtx_(a, b) += va * vb;
    }
  }
  for (int a = 0; a < p_; ++a) {
    xty_[static_cast<std::size_t>(a)] -=
        static_cast<double>(n_) * col_mean_[static_cast<std::size_t>(a)] * y_mean_;
    for (int b = 0; b < p_; ++b) {
      xtx_(a, b) -= static_cast<double>(n_) * col_mean_[static_cast<std::size_t>(a)] *
                    col_mean_[static_cast<std::size_t>(b)];
    }
  }

  state_.beta.assign(static_cast<std::size_t>(p_), 0.0);
  state_.s2.assign(static_cast<std::size_t>(p_), 1.0);
  state_.intercept = y_mean_;
  double var = 0.0;
  for (double y : y_) var += (y - y_mean_) * (y - y_mean_);
  var /= static_cast<double>(n_ - 1);
  state_.sigma2 = std::max(var, 1e-8);
  state_.lambda2 = cfg.fixed_lambda2.value_or(cfg.r / cfg.delta);
}

std::vector<double> GibbsSampler::coefficient_conditional_mean() const {
  Matrix a = xtx_;
  for (int j = 0; j < p_; ++j) a(j, j) += 1.0 / state_.s2[static_cast<std::size_t>(j)];
  Matrix L = cholesky(a);
  return chol_solve(L, xty_);
}

void GibbsSampler::sample_coefficients(Rng& rng) {
  Matrix a = xtx_;
  for (int j = 0; j < p_; ++j) a(j, j) += 1.0 / state_.s2[static_cast<std::size_t>(j)];
  Matrix L = cholesky(a);
  std::vector<double> m = chol_solve(L, xty_);
  std::vector<double> z(static_cast<std::size_t>(p_));
  for (auto& v : z) v = rng.normal();
  std::vector<double> w = solve_lower_transpose(L, z);
  double sd = std::sqrt(state_.sigma2);
  for (int j = 0; j < p_; ++j) {
    state_.beta[static_cast<std::size_t>(j)] =
        m[static_cast<std::size_t>(j)] + sd * w[static_cast<std::size_t>(j)];
  }
}

void GibbsSampler::sample_intercept(Rng& rng) {
  state_.intercept = y_mean_ + std::sqrt(state_.sigma2 / n_) * rng.normal();
}

double GibbsSampler::residual_ss() const {
  // Centered residual via the sparse rows: the offset folds the column
  // means back in so the rows never need densifying.
  double offset = y_mean_;
  for (int j = 0; j < p_; ++j) {
    offset -= col_mean_[static_cast<std::size_t>(j)] * state_.beta[static_cast<std::size_t>(j)];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double fit = offset;
    for (const auto& [col, v] : rows_[i]) {
      fit += v * state_.beta[static_cast<std::size_t>(col)];
    }
    double r = y_[i] - fit;
    ss += r * r;
  }
  return ss;
}

void GibbsSampler::sample_sigma2(Rng& rng) {
  double penalty = 0.0;
  for (int j = 0; j < p_; ++j) {
    double b = state_.beta[static_cast<std::size_t>(j)];
    penalty += b * b / state_.s2[static_cast<std::size_t>(j)];
  }
  double shape = 0.5 * (n_ - 1 + p_);
  double rate = 0.5 * (residual_ss() + penalty);
  if (!(rate > 0.0)) rate = 1e-300;
  // Floor keeps degenerate zero-variance data from driving the chain into
  // underflow; far below any response scale this model sees.
  state_.sigma2 = std::max(rng.inv_gamma(shape, rate), 1e-12);
}

void GibbsSampler::sample_scales(Rng& rng) {
  for (int j = 0; j < p_; ++j) {
    double b2 = state_.beta[static_cast<std::size_t>(j)];
    b2 = std::max(b2 * b2, 1e-24);  // keeps the inverse-Gaussian mean finite
    double m = std::sqrt(state_.lambda2 * state_.sigma2 / b2);
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw NumericalError("scale conditional degenerated (non-finite mean)");
    }
    double inv = rng.inv_gaussian(m, state_.lambda2);
    state_.s2[static_cast<std::size_t>(j)] = 1.0 / inv;
  }
}

void GibbsSampler::sample_lambda2(Rng& rng) {
  if (cfg_.fixed_lambda2) return;
  double shape = static_cast<double>(p_) + cfg_.r;
  double rate = cfg_.delta;
  for (double s2 : state_.s2) rate += 0.5 * s2;
  state_.lambda2 = rng.gamma(shape, 1.0 / rate);
}

void GibbsSampler::step(Rng& rng) {
  sample_coefficients(rng);
  sample_intercept(rng);
  sample_sigma2(rng);
  sample_scales(rng);
  sample_lambda2(rng);
}

double GibbsSampler::report_mu() const {
  double mu = state_.intercept;
  for (int j = 0; j < p_; ++j) {
    mu -= col_mean_[static_cast<std::size_t>(j)] * state_.beta[static_cast<std::size_t>(j)];
  }
  return y_sign_ * mu;
}

void GibbsSampler::report_coefs(std::vector<double>& out) const {
  out.resize(static_cast<std::size_t>(p_));
  for (int orig = 0; orig < p_; ++orig) {
    int canon = canon_of_orig_[static_cast<std::size_t>(orig)];
    out[static_cast<std::size_t>(orig)] = y_sign_ * col_sign_[static_cast<std::size_t>(orig)] *
                                          state_.beta[static_cast<std::size_t>(canon)];
  }
}

namespace {

void check_finite(const GibbsState& st, int iteration) {
  bool ok = std::isfinite(st.sigma2) && st.sigma2 > 0.0 && std::isfinite(st.lambda2) &&
            st.lambda2 > 0.0 && std::isfinite(st.intercept);
  for (double b : st.beta) ok = ok && std::isfinite(b);
  for (double s : st.s2) ok = ok && std::isfinite(s) && s > 0.0;
  if (!ok) {
    throw NumericalError("gibbs_fit: diverged (non-finite state) at iteration " +
                         std::to_string(iteration));
  }
}

}  // namespace

PosteriorDraws gibbs_fit(const RegressionDataset& data, const SamplerConfig& cfg) {
  GibbsSampler sampler(data, cfg);
  Rng rng(cfg.seed);

  int iteration = 0;
  auto advance = [&]() {
    ++iteration;
    try {
      sampler.step(rng);
    } catch (const NumericalError& e) {
      throw NumericalError("gibbs_fit: aborted at iteration " + std::to_string(iteration) + ": " +
                           e.what());
    }
    check_finite(sampler.state(), iteration);
  };

  for (int i = 0; i < cfg.burn_in; ++i) advance();

  PosteriorDraws draws;
  draws.coef_names = data.col_names;
  draws.n_players = data.n_players;
  draws.mu.reserve(static_cast<std::size_t>(cfg.n_keep));
  draws.sigma2.reserve(static_cast<std::size_t>(cfg.n_keep));
  draws.coef = Matrix(cfg.n_keep, sampler.p());

  std::vector<double> coefs;
  for (int kept = 0; kept < cfg.n_keep; ++kept) {
    for (int t = 0; t < cfg.thin; ++t) advance();
    draws.mu.push_back(sampler.report_mu());
    draws.sigma2.push_back(sampler.state().sigma2);
    sampler.report_coefs(coefs);
    for (int j = 0; j < sampler.p(); ++j) draws.coef(kept, j) = coefs[static_cast<std::size_t>(j)];
  }
  return draws;
}

void save_draws_csv(const PosteriorDraws& draws, const std::string& path) {
  auto out = open_output(path);
  out << "mu,sigma2";
  for (const auto& name : draws.coef_names) out << ',' << name;
  out << '\n';
  for (int s = 0; s < draws.n_draws(); ++s) {
    out << fmt_double(draws.mu[static_cast<std::size_t>(s)]) << ','
        << fmt_double(draws.sigma2[static_cast<std::size_t>(s)]);
    for (int j = 0; j < draws.n_coefs(); ++j) out << ',' << fmt_double(draws.coef(s, j));
    out << '\n';
  }
}

PosteriorDraws load_draws_csv(const std::string& path) {
  CsvReader reader(path);
  const auto& header = reader.header();
  if (header.size() < 3 || header[0] != "mu" || header[1] != "sigma2") {
    throw ValidationError(path + ": draws header must start with mu,sigma2");
  }
  PosteriorDraws draws;
  for (std::size_t i = 2; i < header.size(); ++i) {
    const auto& name = header[i];
    if (name.rfind("theta:", 0) == 0) {
      ++draws.n_players;
    } else if (name.rfind("tau:", 0) != 0) {
      throw ValidationError(path + ": unknown coefficient column '" + name + "'");
    }
    draws.coef_names.push_back(name);
  }

  std::vector<std::vector<double>> coef_rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::string where = path + ":" + std::to_string(reader.line_no());
    draws.mu.push_back(parse_double(f[0], where));
    draws.sigma2.push_back(parse_double(f[1], where));
    std::vector<double> row(draws.coef_names.size());
    for (std::size_t i = 2; i < f.size(); ++i) row[i - 2] = parse_double(f[i], where);
    coef_rows.push_back(std::move(row));
  }
  if (coef_rows.empty()) throw ValidationError(path + ": no draws");
  draws.coef = Matrix(static_cast<int>(coef_rows.size()), static_cast<int>(draws.coef_names.size()));
  for (std::size_t s = 0; s < coef_rows.size(); ++s) {
    for (std::size_t j = 0; j < coef_rows[s].size(); ++j) {
      draws.coef(static_cast<int>(s), static_cast<int>(j)) = coef_rows[s][j];
    }
  }
  return draws;
}

}  // namespace winshift
