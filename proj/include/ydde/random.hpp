#pragma once

#include <cstdint>
#include <string_view>

namespace ydde {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for (master, purpose, index). Purpose tags keep the streams of
/// different consumers (drivers, hypothesis sampling, ...) disjoint.
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::uint64_t index);

/// Counter-based standard normal variates: value(i) depends only on (key, i),
/// so any index range can be drawn in any order or in parallel.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : key_(key) {}

  double operator()(std::uint64_t index) const;

  /// Uniform on (0, 1) for counter i.
  double uniform(std::uint64_t index) const;

 private:
  std::uint64_t key_;
};

}  // namespace ydde
