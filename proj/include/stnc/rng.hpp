// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace stnc {

/// SplitMix64 generator with keyed stream derivation.
///
/// Contract (pinned so any reimplementation reproduces the same draws):
///  - mix64(v) = SplitMix64 finalizer of (v + 0x9E3779B97F4A7C15):
///      z = v + 0x9E3779B97F4A7C15
///      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///      z = z ^ (z >> 31)
///  - stream(seed, k) starts from state = mix64(seed ^ mix64(k)); each draw
///    advances the state by 0x9E3779B97F4A7C15 and outputs the finalizer of
///    the new state.
///  - next_unit() maps a draw to ((u >> 11) + 0.5) * 2^-53, uniform on (0,1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix64(std::uint64_t v) {
    std::uint64_t z = v + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Independent stream for a (seed, counter) pair; used one stream per
  /// Monte Carlo trial so results do not depend on worker scheduling.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix64(seed ^ mix64(index)));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double on the open interval (0,1); never returns 0 or 1, so
  /// log() of a draw is always finite.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace stnc
