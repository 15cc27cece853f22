#pragma once

#include <cstdint>

namespace domcode {

struct UpdateDraw {
  double u;  // acceptance variable
  double t;  // position of the update inside its unit time slot
};

// Counter-based source of the per-(vertex, step) uniforms. Identical inputs always
// give identical outputs, so extending a backward horizon reuses earlier draws.
class UpdateStream {
 public:
  explicit UpdateStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  UpdateDraw at(int vertex, int step) const;
  double u(int vertex, int step) const { return at(vertex, step).u; }
  double t(int vertex, int step) const { return at(vertex, step).t; }

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);
// Uniform in (0, 1) from the top 53 bits.
double to_open_unit(std::uint64_t bits);
// Seed of the k-th member of a stream family.
std::uint64_t family_seed(std::uint64_t base, std::uint64_t k);

}  // namespace domcode
