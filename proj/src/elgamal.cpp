#include "kite/elgamal.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "kite/error.hpp"

namespace kite {

void Ciphertext::encode(ByteWriter& w) const {
  c1.encode(w);
  c2.encode(w);
}

Ciphertext Ciphertext::decode(ByteReader& r) {
  Ciphertext ct;
  ct.c1 = Point::decode(r);
  ct.c2 = Point::decode(r);
  return ct;
}

EncKeyPair EncKeyPair::from_secret(const Scalar& sk) { return {sk, Point::base_mul(sk)}; }

EncKeyPair enc_keygen(RandomSource& rng) {
  Scalar sk;
  do {
    sk = Scalar::random(rng);
  } while (sk.is_zero());
  return EncKeyPair::from_secret(sk);
}

namespace {

std::uint64_t magnitude(std::int64_t m) {
  return m < 0 ? 0 - static_cast<std::uint64_t>(m) : static_cast<std::uint64_t>(m);
}

}  // namespace

Ciphertext encrypt(const Point& pk, std::int64_t m, const Scalar& r, std::uint64_t bound) {
  if (magnitude(m) > bound) throw Error(ErrorCode::MessageOutOfRange);
  return {Point::base_mul(r), Point::base_mul(m) + pk * r};
}

std::int64_t decrypt(const Scalar& sk, const Ciphertext& ct, std::uint64_t bound) {
  const Point gm = ct.c2 - ct.c1 * sk;
  return DiscreteLog::for_bound(bound)->solve(gm);
}

Ciphertext ct_add(const Ciphertext& a, const Ciphertext& b) { return {a.c1 + b.c1, a.c2 + b.c2}; }

Ciphertext ct_neg(const Ciphertext& a) { return {-a.c1, -a.c2}; }

Ciphertext ct_sub(const Ciphertext& a, const Ciphertext& b) { return {a.c1 - b.c1, a.c2 - b.c2}; }

Ciphertext rerandomize(const Point& pk, const Ciphertext& ct, const Scalar& r) {
  if (r.is_zero()) return ct;
  return ct_add(ct, {Point::base_mul(r), pk * r});
}

std::size_t DiscreteLog::KeyHash::operator()(const std::array<std::uint8_t, 32>& k) const noexcept {
  std::size_t h;
  std::memcpy(&h, k.data(), sizeof(h));
  return h;
}

DiscreteLog::DiscreteLog(std::uint64_t bound) : bound_(bound) {
  // Search space is [0, 2*bound] after shifting by g^bound.
  const long double n = 2.0L * static_cast<long double>(bound) + 1.0L;
  step_ = static_cast<std::uint64_t>(std::ceil(std::sqrt(n)));
  while (step_ * step_ < 2 * bound + 1) ++step_;
  baby_.reserve(step_);
  Point acc = Point::identity();
  const Point& g = Point::generator();
  for (std::uint64_t j = 0; j < step_; ++j) {
    baby_.emplace(acc.to_bytes(), j);
    acc = acc + g;
  }
  giant_ = -Point::base_mul(Scalar::from_u64(step_));
}

std::shared_ptr<const DiscreteLog> DiscreteLog::for_bound(std::uint64_t bound) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const DiscreteLog>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[bound];
  if (!slot) slot = std::make_shared<const DiscreteLog>(bound);
  return slot;
}

std::int64_t DiscreteLog::solve(const Point& target) const {
  const std::uint64_t span = 2 * bound_;
  Point y = target + Point::base_mul(Scalar::from_u64(bound_));
  for (std::uint64_t i = 0; i < step_; ++i) {
    auto it = baby_.find(y.to_bytes());
    if (it != baby_.end()) {
      const std::uint64_t shifted = i * step_ + it->second;
      if (shifted <= span) {
        return static_cast<std::int64_t>(shifted) - static_cast<std::int64_t>(bound_);
      }
      break;
    }
    y = y + giant_;
  }
  throw Error(ErrorCode::DlogNotFound);
}

}  // namespace kite
