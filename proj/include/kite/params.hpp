#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kite/codec.hpp"

namespace kite {

using PartyIndex = std::uint32_t;
using ElectionId = std::uint64_t;

struct SystemParams {
  // M: total token supply, also the plaintext bound for decryption.
  std::uint64_t max_total = 1;
  std::uint32_t num_options = 3;

  bool operator==(const SystemParams&) const = default;

  void validate() const;
  void encode(ByteWriter& w) const;
  static SystemParams decode(ByteReader& r);
};

// "yes", "no", "abstain" for three options, "option<i>" otherwise.
std::string option_name(std::uint32_t option, std::uint32_t num_options);
// Accepts an option name or a decimal index; throws Error(BadOption).
std::uint32_t parse_option(const std::string& text, std::uint32_t num_options);

}  // namespace kite
