#include "kite/codec.hpp"

#include <sodium.h>

#include "kite/error.hpp"

namespace kite {

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  return *this;
}

ByteWriter& ByteWriter::i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::raw(std::span<const std::uint8_t> data) {
  out_.insert(out_.end(), data.begin(), data.end());
  return *this;
}

ByteWriter& ByteWriter::blob(std::span<const std::uint8_t> data) {
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}

ByteWriter& ByteWriter::str(std::string_view s) {
  return blob({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (data_.size() - pos_ < n) throw Error(ErrorCode::InvalidEncoding, "truncated input");
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32() {
  std::uint32_t v = 0;
  for (auto b : raw(4)) v = (v << 8) | b;
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v = 0;
  for (auto b : raw(8)) v = (v << 8) | b;
  return v;
}

std::int64_t ByteReader::i64() { return static_cast<std::int64_t>(u64()); }

Bytes ByteReader::blob() {
  const std::uint32_t n = u32();
  auto span = raw(n);
  return Bytes(span.begin(), span.end());
}

std::string ByteReader::str() {
  auto b = blob();
  return std::string(b.begin(), b.end());
}

std::uint32_t ByteReader::count(std::size_t min_size) {
  const std::uint32_t n = u32();
  if (min_size > 0 && static_cast<std::size_t>(n) > (data_.size() - pos_) / min_size) {
    throw Error(ErrorCode::InvalidEncoding, "element count exceeds input");
  }
  return n;
}

void ByteReader::expect_done() const {
  if (!done()) throw Error(ErrorCode::InvalidEncoding, "trailing bytes");
}

std::string to_hex(std::span<const std::uint8_t> data) {
  std::string out(data.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), data.data(), data.size());
  out.pop_back();
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::InvalidEncoding, "odd-length hex");
  Bytes out(hex.size() / 2);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_hex2bin(out.data(), out.size(), hex.data(), hex.size(), nullptr, &len, &end) != 0 ||
      len != out.size() || end != hex.data() + hex.size()) {
    throw Error(ErrorCode::InvalidEncoding, "bad hex");
  }
  return out;
}

}  // namespace kite
