#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace kite {

// Source of uniformly random bytes. Provers, key generation and anonymity-set
// sampling all draw from a caller-supplied source so runs can be replayed.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t next_u64();
  // Uniform in [0, bound); bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);
};

// Operating-system randomness.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// ChaCha20 keystream under a key derived from the seed. Deterministic and
// reproducible; used by tests, trace generation and the simulator.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed);
  explicit SeededRandom(std::span<const std::uint8_t, 32> key);

  void fill(std::span<std::uint8_t> out) override;

 private:
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t block_ = 0;
};

}  // namespace kite
