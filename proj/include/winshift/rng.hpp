#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace winshift {

// Deterministic random source. All variate generators are implemented here
// rather than through std distributions so that a given seed produces the
// same stream on every platform and toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for a named pipeline stage, derived from the base
  // seed, not from the current generator state.
  Rng derive(std::string_view label) const;

  std::uint64_t next_u64();
  double uniform();              // [0, 1)
  int uniform_int(int n);        // {0, ..., n-1}
  double normal();               // N(0, 1), Marsaglia polar
  double gamma(double shape, double scale);
  double inv_gamma(double shape, double rate);

  // Inverse-Gaussian(mean m, shape s) by the transformation-with-rejection
  // method of Michael, Schucany and Haas.
  double inv_gaussian(double m, double s);

  std::uint64_t base_seed() const { return base_seed_; }

 private:
  std::mt19937_64 gen_;
  std::uint64_t base_seed_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

}  // namespace winshift
