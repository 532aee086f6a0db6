#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kite {

// Shared tally quantization: floor(10000 * D_i / sum D) basis points, or all
// zeros when nothing was counted. Used by both the real tally and the ideal
// functionality.
struct Percentages {
  std::vector<std::uint32_t> basis_points;
  bool no_votes = false;

  bool operator==(const Percentages&) const = default;
};

// Throws std::invalid_argument on negative counts.
Percentages basis_points(std::span<const std::int64_t> counts);

// "yes 80.00% no 20.00% abstain 0.00%"
std::string format_percentages(std::span<const std::uint32_t> basis_points);

}  // namespace kite
