#include "kite/params.hpp"

#include <charconv>

#include "kite/error.hpp"

namespace kite {

void SystemParams::validate() const {
  if (max_total < 1) throw Error(ErrorCode::MalformedRequest, "max_total must be >= 1");
  if (num_options < 2) throw Error(ErrorCode::MalformedRequest, "num_options must be >= 2");
}

void SystemParams::encode(ByteWriter& w) const { w.u64(max_total).u32(num_options); }

SystemParams SystemParams::decode(ByteReader& r) {
  SystemParams p;
  p.max_total = r.u64();
  p.num_options = r.u32();
  return p;
}

std::string option_name(std::uint32_t option, std::uint32_t num_options) {
  if (num_options == 3) {
    static const char* kNames[] = {"yes", "no", "abstain"};
    if (option < 3) return kNames[option];
  }
  return "option" + std::to_string(option);
}

std::uint32_t parse_option(const std::string& text, std::uint32_t num_options) {
  for (std::uint32_t i = 0; i < num_options; ++i) {
    if (text == option_name(i, num_options)) return i;
  }
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size() && v < num_options) return v;
  throw Error(ErrorCode::BadOption, text);
}

}  // namespace kite
