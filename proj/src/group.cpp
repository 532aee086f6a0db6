#include "kite/group.hpp"

#include <sodium.h>

#include <algorithm>

#include "kite/error.hpp"
#include "kite/sodium_init.hpp"

namespace kite {

const GroupParams& GroupParams::standard() {
  static const GroupParams params{};
  return params;
}

Scalar Scalar::from_u64(std::uint64_t v) {
  Scalar s;
  for (int i = 0; i < 8; ++i) s.le_[i] = static_cast<std::uint8_t>(v >> (8 * i));
  return s;
}

Scalar Scalar::from_i64(std::int64_t v) {
  if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
  // -(INT64_MIN) overflows as signed but is exact as unsigned.
  return -from_u64(0 - static_cast<std::uint64_t>(v));
}

Scalar Scalar::random(RandomSource& rng) {
  std::array<std::uint8_t, 64> wide{};
  rng.fill(wide);
  return reduce_wide(wide);
}

Scalar Scalar::reduce_wide(std::span<const std::uint8_t, 64> wide) {
  ensure_sodium();
  Scalar s;
  crypto_core_ristretto255_scalar_reduce(s.le_.data(), wide.data());
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar s;
  crypto_core_ristretto255_scalar_add(s.le_.data(), le_.data(), o.le_.data());
  return s;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar s;
  crypto_core_ristretto255_scalar_sub(s.le_.data(), le_.data(), o.le_.data());
  return s;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar s;
  crypto_core_ristretto255_scalar_mul(s.le_.data(), le_.data(), o.le_.data());
  return s;
}

Scalar Scalar::operator-() const {
  Scalar s;
  crypto_core_ristretto255_scalar_negate(s.le_.data(), le_.data());
  return s;
}

bool Scalar::is_zero() const { return sodium_is_zero(le_.data(), le_.size()) == 1; }

std::array<std::uint8_t, 32> Scalar::to_bytes() const {
  std::array<std::uint8_t, 32> be{};
  std::reverse_copy(le_.begin(), le_.end(), be.begin());
  return be;
}

Scalar Scalar::from_bytes(std::span<const std::uint8_t> be) {
  if (be.size() != 32) throw Error(ErrorCode::InvalidEncoding, "scalar must be 32 bytes");
  ensure_sodium();
  Scalar s;
  std::reverse_copy(be.begin(), be.end(), s.le_.begin());
  // Canonical iff reduction is a no-op.
  std::array<std::uint8_t, 64> wide{};
  std::copy(s.le_.begin(), s.le_.end(), wide.begin());
  Scalar reduced;
  crypto_core_ristretto255_scalar_reduce(reduced.le_.data(), wide.data());
  if (!(reduced == s)) throw Error(ErrorCode::InvalidEncoding, "scalar not reduced modulo q");
  return s;
}

void Scalar::encode(ByteWriter& w) const { w.raw(to_bytes()); }

Scalar Scalar::decode(ByteReader& r) { return from_bytes(r.raw(32)); }

const Point& Point::generator() {
  static const Point g = base_mul(Scalar::one());
  return g;
}

Point Point::base_mul(const Scalar& s) {
  ensure_sodium();
  Point p;
  // A zero result (s = 0) is reported as failure but the identity encoding
  // is still written, which is exactly what we want.
  if (crypto_scalarmult_ristretto255_base(p.enc_.data(), s.little_endian().data()) != 0) {
    p.enc_.fill(0);
  }
  return p;
}

Point Point::operator+(const Point& o) const {
  Point p;
  if (crypto_core_ristretto255_add(p.enc_.data(), enc_.data(), o.enc_.data()) != 0) {
    throw Error(ErrorCode::InvalidEncoding, "point addition on invalid element");
  }
  return p;
}

Point Point::operator-(const Point& o) const {
  Point p;
  if (crypto_core_ristretto255_sub(p.enc_.data(), enc_.data(), o.enc_.data()) != 0) {
    throw Error(ErrorCode::InvalidEncoding, "point subtraction on invalid element");
  }
  return p;
}

Point Point::operator-() const { return identity() - *this; }

Point Point::operator*(const Scalar& s) const {
  if (is_identity() || s.is_zero()) return identity();
  Point p;
  if (crypto_scalarmult_ristretto255(p.enc_.data(), s.little_endian().data(), enc_.data()) != 0) {
    p.enc_.fill(0);
  }
  return p;
}

bool Point::is_identity() const { return sodium_is_zero(enc_.data(), enc_.size()) == 1; }

Point Point::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 32) throw Error(ErrorCode::InvalidEncoding, "group element must be 32 bytes");
  ensure_sodium();
  if (crypto_core_ristretto255_is_valid_point(bytes.data()) != 1) {
    throw Error(ErrorCode::InvalidEncoding, "not a ristretto255 group element");
  }
  Point p;
  std::copy(bytes.begin(), bytes.end(), p.enc_.begin());
  return p;
}

void Point::encode(ByteWriter& w) const { w.raw(enc_); }

Point Point::decode(ByteReader& r) { return from_bytes(r.raw(32)); }

}  // namespace kite
