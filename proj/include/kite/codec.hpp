#pragma once

// Canonical byte encoding. All integers are big-endian and fixed width;
// variable-length sequences carry a u32 element count. Digests and
// Fiat-Shamir challenges are computed over these bytes, so the layout is
// part of the wire format.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kite {

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v);
  ByteWriter& raw(std::span<const std::uint8_t> data);
  // u32 length prefix followed by the bytes.
  ByteWriter& blob(std::span<const std::uint8_t> data);
  ByteWriter& str(std::string_view s);

  template <typename T>
  ByteWriter& items(const std::vector<T>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (const auto& x : v) x.encode(*this);
    return *this;
  }

  const Bytes& bytes() const& { return out_; }
  Bytes bytes() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Reads the encoding produced by ByteWriter; any truncation or malformed
// field throws Error(InvalidEncoding).
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  std::span<const std::uint8_t> raw(std::size_t n);
  Bytes blob();
  std::string str();
  // Element count bounded by the bytes that remain, assuming each element
  // occupies at least min_size bytes.
  std::uint32_t count(std::size_t min_size = 1);

  template <typename T>
  std::vector<T> items() {
    const std::uint32_t n = count();
    std::vector<T> v;
    v.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) v.push_back(T::decode(*this));
    return v;
  }

  bool done() const { return pos_ == data_.size(); }
  void expect_done() const;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

}  // namespace kite
