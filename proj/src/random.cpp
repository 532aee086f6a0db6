#include "kite/random.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "kite/sodium_init.hpp"

namespace kite {

std::uint64_t RandomSource::next_u64() {
  std::array<std::uint8_t, 8> buf{};
  fill(buf);
  std::uint64_t v = 0;
  for (auto b : buf) v = (v << 8) | b;
  return v;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform: zero bound");
  // Rejection sampling removes the modulo bias.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  ensure_sodium();
  randombytes_buf(out.data(), out.size());
}

SeededRandom::SeededRandom(std::uint64_t seed) {
  ensure_sodium();
  std::array<std::uint8_t, 16> material{'k', 'i', 't', 'e', '-', 'r', 'n', 'g'};
  for (int i = 0; i < 8; ++i) material[8 + i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  crypto_hash_sha256(key_.data(), material.data(), material.size());
}

SeededRandom::SeededRandom(std::span<const std::uint8_t, 32> key) {
  ensure_sodium();
  std::copy(key.begin(), key.end(), key_.begin());
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  // One fresh nonce per request keeps every call independent of the size of
  // earlier requests.
  std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
  std::memcpy(nonce.data(), &block_, sizeof(block_));
  ++block_;
  crypto_stream_chacha20_ietf(out.data(), out.size(), nonce.data(), key_.data());
}

}  // namespace kite
