#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "kite/codec.hpp"
#include "kite/random.hpp"

namespace kite {

struct VerifyKey {
  std::array<std::uint8_t, 32> bytes{};
  bool operator==(const VerifyKey&) const = default;
  void encode(ByteWriter& w) const { w.raw(bytes); }
  static VerifyKey decode(ByteReader& r);
};

struct Signature {
  std::array<std::uint8_t, 64> bytes{};
  bool operator==(const Signature&) const = default;
  void encode(ByteWriter& w) const { w.raw(bytes); }
  static Signature decode(ByteReader& r);
};

struct SigKeyPair {
  VerifyKey vk;
  std::array<std::uint8_t, 64> sk{};
};

SigKeyPair sig_keygen(RandomSource& rng);
// Rebuilds the pair from a persisted 64-byte secret key.
SigKeyPair sig_from_secret(std::span<const std::uint8_t, 64> sk);
Signature sig_sign(const SigKeyPair& keys, std::span<const std::uint8_t> msg);
bool sig_verify(const VerifyKey& vk, std::span<const std::uint8_t> msg, const Signature& sig);

}  // namespace kite
