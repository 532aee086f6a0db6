#pragma once

// Exponential ElGamal over ristretto255: Enc(pk, m; r) = (g^r, g^m * pk^r).
// Additively homomorphic; decryption recovers m by a bounded discrete-log
// search over [-M, M].

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "kite/group.hpp"

namespace kite {

struct Ciphertext {
  Point c1;
  Point c2;

  bool operator==(const Ciphertext&) const = default;

  void encode(ByteWriter& w) const;
  static Ciphertext decode(ByteReader& r);
};

struct EncKeyPair {
  Scalar sk;
  Point pk;

  static EncKeyPair from_secret(const Scalar& sk);
};

EncKeyPair enc_keygen(RandomSource& rng);

// Throws Error(MessageOutOfRange) if |m| > bound.
Ciphertext encrypt(const Point& pk, std::int64_t m, const Scalar& r, std::uint64_t bound);

// Throws Error(DlogNotFound) when the plaintext is outside [-bound, bound].
std::int64_t decrypt(const Scalar& sk, const Ciphertext& ct, std::uint64_t bound);

Ciphertext ct_add(const Ciphertext& a, const Ciphertext& b);
Ciphertext ct_neg(const Ciphertext& a);
Ciphertext ct_sub(const Ciphertext& a, const Ciphertext& b);
Ciphertext rerandomize(const Point& pk, const Ciphertext& ct, const Scalar& r);

// Enc(pk, 0; 0) = (identity, identity), independent of pk.
inline Ciphertext zero_ciphertext() { return {}; }

// Baby-step/giant-step solver for g^x with x in [-bound, bound]. Tables are
// immutable once built; for_bound() caches them process-wide.
class DiscreteLog {
 public:
  explicit DiscreteLog(std::uint64_t bound);

  static std::shared_ptr<const DiscreteLog> for_bound(std::uint64_t bound);

  std::int64_t solve(const Point& target) const;
  std::uint64_t bound() const { return bound_; }
  std::uint64_t table_size() const { return step_; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::array<std::uint8_t, 32>& k) const noexcept;
  };

  std::uint64_t bound_;
  std::uint64_t step_;
  Point giant_;  // g^{-step}
  std::unordered_map<std::array<std::uint8_t, 32>, std::uint64_t, KeyHash> baby_;
};

}  // namespace kite
