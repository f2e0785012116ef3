// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The reqrnn Authors

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace reqrnn {

/// One Philox4x32-10 block: 10 rounds over a 128-bit counter and 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Philox4x32-10 counter-based generator.
///
/// Block i of generator (seed, stream) is philox4x32_10({i lo, i hi,
/// stream lo, stream hi}, {seed lo, seed hi}).
///
/// A generator is addressed by (seed, stream); identical pairs produce
/// identical draw sequences on every platform. Streams are independent, so
/// parallel work items take `Rng(seed, item_index)` instead of sharing one
/// generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  std::uint32_t next_u32();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Unbiased integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Child generator keyed by the next draw. Advances this generator.
  Rng fork();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::uint32_t block_[4] = {0, 0, 0, 0};
  int next_ = 4;
};

/// Fisher-Yates, platform-stable (std::shuffle is not).
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

/// Stateless 64-bit mixer (splitmix64 finalizer); used to derive seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace reqrnn
