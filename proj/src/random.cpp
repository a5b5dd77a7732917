#include "ydde/random.hpp"

#include <cmath>
#include <numbers>

namespace ydde {

std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose, std::uint64_t index) {
  // FNV-1a over the tag, then folded with the master seed and index.
  std::uint64_t tag = 0xcbf29ce484222325ULL;
  for (char c : purpose) {
    tag ^= static_cast<unsigned char>(c);
    tag *= 0x100000001b3ULL;
  }
  return mix64(mix64(master ^ mix64(tag)) + index);
}

double GaussianStream::uniform(std::uint64_t index) const {
  const std::uint64_t bits = mix64(key_ ^ mix64(index + 0x632be59bd9b4e019ULL));
  // 53 random bits, shifted off zero.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::operator()(std::uint64_t index) const {
  const std::uint64_t pair = index >> 1;
  const double u1 = uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1U) ? radius * std::sin(angle) : radius * std::cos(angle);
}

}  // namespace ydde
