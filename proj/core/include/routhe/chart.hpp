#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "routhe/linalg.hpp"

namespace routhe {

/// A single coordinate chart. Angle coordinates are stored unwrapped (on the
/// universal cover), so no wrapping is ever applied to differences.
struct Chart {
  std::string id;
  std::size_t dim = 0;
  std::vector<std::size_t> positive;  // coordinates constrained to > 0
  std::vector<std::size_t> angular;   // informational only

  bool contains(std::span<const double> q) const;
  /// Throws DomainError naming `what` and the offending coordinate.
  void require(std::span<const double> q, const std::string& what = "point") const;

  static Chart euclidean(std::size_t n, std::string id = {});
};

namespace charts {
Chart bar();               // (phi, x, y), phi an angle
Chart central();           // (r, eta), r > 0
Chart reduced_radial();    // (r), r > 0
Chart bar_quotient();      // (phi, y)
}  // namespace charts

}  // namespace routhe
