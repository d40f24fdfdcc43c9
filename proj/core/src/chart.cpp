#include "routhe/chart.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "routhe/errors.hpp"
#include "routhe/field.hpp"

namespace routhe {

bool Chart::contains(std::span<const double> q) const {
  if (q.size() != dim) return false;
  for (double x : q)
    if (!std::isfinite(x)) return false;
  for (std::size_t k : positive)
    if (!(q[k] > 0.0)) return false;
  return true;
}

void Chart::require(std::span<const double> q, const std::string& what) const {
  if (q.size() != dim)
    throw DomainError(what + ": expected " + std::to_string(dim) + " coordinates for chart '" + id +
                      "', got " + std::to_string(q.size()));
  for (std::size_t k = 0; k < q.size(); ++k)
    if (!std::isfinite(q[k]))
      throw DomainError(what + ": coordinate " + std::to_string(k) + " is not finite");
  for (std::size_t k : positive)
    if (!(q[k] > 0.0))
      throw DomainError(what + " left chart '" + id + "': coordinate " + std::to_string(k) +
                        " must be > 0, got " + std::to_string(q[k]));
}

Chart Chart::euclidean(std::size_t n, std::string id) {
  if (id.empty()) id = "R" + std::to_string(n);
  return Chart{std::move(id), n, {}, {}};
}

namespace charts {
Chart bar() { return Chart{"bar-S1xR2", 3, {}, {0}}; }
Chart central() { return Chart{"central-(r,eta)", 2, {0}, {1}}; }
Chart reduced_radial() { return Chart{"reduced-r", 1, {0}, {}}; }
Chart bar_quotient() { return Chart{"bar-quotient-(phi,y)", 2, {}, {0}}; }
}  // namespace charts

void throw_tower_exhausted(const char* who) {
  throw Error(std::string(who) + ": derivative order exceeds the supported dual depth");
}

}  // namespace routhe
