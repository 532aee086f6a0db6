#include "kite/hash.hpp"

#include <sodium.h>

#include <algorithm>
#include <string>

#include "kite/error.hpp"
#include "kite/sodium_init.hpp"

namespace kite {
namespace {

constexpr DomainTag kAllTags[] = {
    DomainTag::Leaf,         DomainTag::Node,   DomainTag::Empty,
    DomainTag::DelegationId, DomainTag::State,  DomainTag::FsDelegation,
    DomainTag::FsVote,       DomainTag::FsDecryption,
};

}  // namespace

bool Digest::is_zero() const {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

Digest Digest::decode(ByteReader& r) { return from_bytes(r.raw(32)); }

Digest Digest::from_bytes(std::span<const std::uint8_t> b) {
  if (b.size() != 32) throw Error(ErrorCode::InvalidEncoding, "digest must be 32 bytes");
  Digest d;
  std::copy(b.begin(), b.end(), d.bytes.begin());
  return d;
}

std::string_view label(DomainTag tag) {
  switch (tag) {
    case DomainTag::Leaf: return "leaf";
    case DomainTag::Node: return "node";
    case DomainTag::Empty: return "empty";
    case DomainTag::DelegationId: return "did";
    case DomainTag::State: return "state";
    case DomainTag::FsDelegation: return "fs/delegation";
    case DomainTag::FsVote: return "fs/vote";
    case DomainTag::FsDecryption: return "fs/decryption";
  }
  return "";
}

Digest hash(DomainTag tag, std::span<const std::uint8_t> data) {
  ensure_sodium();
  const std::string_view l = label(tag);
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  const auto len = static_cast<unsigned char>(l.size());
  crypto_hash_sha256_update(&st, &len, 1);
  crypto_hash_sha256_update(&st, reinterpret_cast<const unsigned char*>(l.data()), l.size());
  crypto_hash_sha256_update(&st, data.data(), data.size());
  Digest d;
  crypto_hash_sha256_final(&st, d.bytes.data());
  return d;
}

Digest hash(std::string_view tag_label, std::span<const std::uint8_t> data) {
  for (DomainTag t : kAllTags) {
    if (label(t) == tag_label) return hash(t, data);
  }
  throw Error(ErrorCode::UnknownDomainTag, std::string(tag_label));
}

}  // namespace kite
