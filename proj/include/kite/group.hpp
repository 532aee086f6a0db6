#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string_view>

#include "kite/codec.hpp"
#include "kite/random.hpp"

namespace kite {

// Description of the prime-order group all encryption happens in. There is
// one group: ristretto255, order q = 2^252 + 27742317777372353535851937790883648493.
struct GroupParams {
  std::string_view group_id = "ristretto255";
  // Bit length of q.
  unsigned order_bits = 253;

  static const GroupParams& standard();
};

// Element of Z_q. Stored little-endian internally; the canonical encoding is
// 32 bytes big-endian and must be < q.
class Scalar {
 public:
  Scalar() = default;  // zero

  static Scalar zero() { return {}; }
  static Scalar one() { return from_u64(1); }
  static Scalar from_u64(std::uint64_t v);
  // Negative values map to q - |v|.
  static Scalar from_i64(std::int64_t v);
  static Scalar random(RandomSource& rng);
  // Uniform reduction of 64 bytes modulo q.
  static Scalar reduce_wide(std::span<const std::uint8_t, 64> wide);

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }

  bool is_zero() const;
  bool operator==(const Scalar& o) const = default;

  std::array<std::uint8_t, 32> to_bytes() const;  // big-endian
  static Scalar from_bytes(std::span<const std::uint8_t> be);  // rejects values >= q

  void encode(ByteWriter& w) const;
  static Scalar decode(ByteReader& r);

  const std::array<std::uint8_t, 32>& little_endian() const { return le_; }

 private:
  std::array<std::uint8_t, 32> le_{};
};

// Element of the ristretto255 group. Any value of this type is a valid group
// element: decoding rejects everything else.
class Point {
 public:
  Point() = default;  // identity

  static Point identity() { return {}; }
  static const Point& generator();
  // g^s
  static Point base_mul(const Scalar& s);
  // g^m for a signed exponent.
  static Point base_mul(std::int64_t m) { return base_mul(Scalar::from_i64(m)); }

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point operator-() const;
  Point operator*(const Scalar& s) const;

  bool is_identity() const;
  bool operator==(const Point& o) const = default;
  auto operator<=>(const Point& o) const = default;

  const std::array<std::uint8_t, 32>& to_bytes() const { return enc_; }
  static Point from_bytes(std::span<const std::uint8_t> bytes);

  void encode(ByteWriter& w) const;
  static Point decode(ByteReader& r);

 private:
  std::array<std::uint8_t, 32> enc_{};
};

}  // namespace kite
