#include "domcode/stream.hpp"

namespace domcode {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t family_seed(std::uint64_t base, std::uint64_t k) {
  return splitmix64(base ^ splitmix64(k + 0x632be59bd9b4e019ULL));
}

UpdateDraw UpdateStream::at(int vertex, int step) const {
  const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(vertex)) << 32) |
                            static_cast<std::uint32_t>(step);
  const std::uint64_t h = splitmix64(seed_ ^ splitmix64(key));
  return {to_open_unit(h), to_open_unit(splitmix64(h))};
}

}  // namespace domcode
