#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bminres {

/// Elementary reflector I - beta * v v^T acting on rows [offset, offset + v.size()).
/// v[0] == 1 by convention; beta == 0 encodes the identity.
struct HouseholderReflector {
  std::size_t offset = 0;
  std::vector<double> v;
  double beta = 0.0;

  std::size_t length() const noexcept { return v.size(); }
};

/// Builds the reflector mapping c to (||c||, 0, ..., 0). A segment whose tail
/// is already zero yields the identity. The returned reflector has offset 0;
/// callers place it.
HouseholderReflector householder_generate(std::span<const double> c);

/// c <- (I - beta v v^T) c. c.size() must equal h.length().
void householder_apply(const HouseholderReflector& h, std::span<double> c);

}  // namespace bminres
