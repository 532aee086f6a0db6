#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string_view>

#include "kite/codec.hpp"

namespace kite {

// 256-bit digest.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  bool is_zero() const;
  auto operator<=>(const Digest&) const = default;

  void encode(ByteWriter& w) const { w.raw(bytes); }
  static Digest decode(ByteReader& r);
  static Digest from_bytes(std::span<const std::uint8_t> b);
};

// Registered domain-separation labels. Distinct labels give independent
// hash functions.
enum class DomainTag : std::uint8_t {
  Leaf,
  Node,
  Empty,
  DelegationId,
  State,
  FsDelegation,
  FsVote,
  FsDecryption,
};

std::string_view label(DomainTag tag);

// SHA-256 over (u8 label length || label || data).
Digest hash(DomainTag tag, std::span<const std::uint8_t> data);
// Label-addressed variant; throws Error(UnknownDomainTag) for unregistered labels.
Digest hash(std::string_view tag_label, std::span<const std::uint8_t> data);

}  // namespace kite
