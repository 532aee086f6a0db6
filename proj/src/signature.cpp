#include "kite/signature.hpp"

#include <sodium.h>

#include <algorithm>

#include "kite/sodium_init.hpp"

namespace kite {

VerifyKey VerifyKey::decode(ByteReader& r) {
  VerifyKey vk;
  auto b = r.raw(vk.bytes.size());
  std::copy(b.begin(), b.end(), vk.bytes.begin());
  return vk;
}

Signature Signature::decode(ByteReader& r) {
  Signature s;
  auto b = r.raw(s.bytes.size());
  std::copy(b.begin(), b.end(), s.bytes.begin());
  return s;
}

SigKeyPair sig_keygen(RandomSource& rng) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_sign_SEEDBYTES> seed{};
  rng.fill(seed);
  SigKeyPair keys;
  crypto_sign_seed_keypair(keys.vk.bytes.data(), keys.sk.data(), seed.data());
  sodium_memzero(seed.data(), seed.size());
  return keys;
}

SigKeyPair sig_from_secret(std::span<const std::uint8_t, 64> sk) {
  ensure_sodium();
  SigKeyPair keys;
  std::copy(sk.begin(), sk.end(), keys.sk.begin());
  crypto_sign_ed25519_sk_to_pk(keys.vk.bytes.data(), keys.sk.data());
  return keys;
}

Signature sig_sign(const SigKeyPair& keys, std::span<const std::uint8_t> msg) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, msg.data(), msg.size(), keys.sk.data());
  return sig;
}

bool sig_verify(const VerifyKey& vk, std::span<const std::uint8_t> msg, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), msg.data(), msg.size(), vk.bytes.data()) == 0;
}

}  // namespace kite
