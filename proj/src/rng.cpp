#include "winshift/rng.hpp"

#include <cmath>
#include <limits>

#include "winshift/errors.hpp"

namespace winshift {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(base ^ h);
}

Rng::Rng(std::uint64_t seed) : gen_(seed), base_seed_(seed) {}

Rng Rng::derive(std::string_view label) const { return Rng(derive_seed(base_seed_, label)); }

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw ValidationError("uniform_int: n must be positive");
  // Rejection to avoid modulo bias.
  std::uint64_t un = static_cast<std::uint64_t>(n);
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / un * un;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return static_cast<int>(x % un);
}

double Rng::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_normal_ = true;
  return u * f;
}

// Marsaglia and Tsang; shapes below one go through the boosting identity.
double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw ValidationError("gamma: non-positive parameter");
  if (shape < 1.0) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

double Rng::inv_gamma(double shape, double rate) {
  if (!(rate > 0.0)) throw ValidationError("inv_gamma: non-positive rate");
  return rate / gamma(shape, 1.0);
}

double Rng::inv_gaussian(double m, double s) {
  if (!(m > 0.0) || !(s > 0.0) || !std::isfinite(m) || !std::isfinite(s)) {
    throw ValidationError("inv_gaussian: parameters must be finite and positive");
  }
  double z = normal();
  double y = z * z;
  // x = m * (1 + t - sqrt(t^2 + 2t)) with t = m*y/(2s), written to stay
  // positive under cancellation for large t.
  double t = m * y / (2.0 * s);
  double root = std::sqrt(t * t + 2.0 * t);
  double x = m * (1.0 - 2.0 * t / (t + root));
  if (t == 0.0) x = m;
  if (!(x > 0.0)) x = std::numeric_limits<double>::min();
  double u = uniform();
  if (u <= m / (m + x)) return x;
  return m * m / x;
}

}  // namespace winshift
