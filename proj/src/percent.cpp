#include "kite/percent.hpp"

#include <cstdio>
#include <stdexcept>

#include "kite/params.hpp"

namespace kite {

Percentages basis_points(std::span<const std::int64_t> counts) {
  unsigned __int128 total = 0;
  for (auto c : counts) {
    if (c < 0) throw std::invalid_argument("negative tally count");
    total += static_cast<std::uint64_t>(c);
  }
  Percentages out;
  out.basis_points.assign(counts.size(), 0);
  if (total == 0) {
    out.no_votes = true;
    return out;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const unsigned __int128 scaled = static_cast<unsigned __int128>(counts[i]) * 10000u;
    out.basis_points[i] = static_cast<std::uint32_t>(scaled / total);
  }
  return out;
}

std::string format_percentages(std::span<const std::uint32_t> basis_points) {
  std::string out;
  const auto n = static_cast<std::uint32_t>(basis_points.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%s %u.%02u%%", i ? " " : "", option_name(i, n).c_str(),
                  basis_points[i] / 100, basis_points[i] % 100);
    out += buf;
  }
  return out;
}

}  // namespace kite
