#include "bminres/householder.hpp"

#include <cmath>

#include "bminres/block_vector.hpp"
#include "bminres/errors.hpp"

namespace bminres {

HouseholderReflector householder_generate(std::span<const double> c) {
  HouseholderReflector h;
  h.v.assign(c.size(), 0.0);
  if (c.empty()) return h;
  h.v[0] = 1.0;
  const double alpha = c[0];
  const double sigma_root = nrm2(c.subspan(1));
  if (sigma_root == 0.0) return h;

  // Choose v0 = alpha - mu without cancellation so the image is +||c|| e1.
  const double mu = std::hypot(alpha, sigma_root);
  const double v0 = alpha <= 0.0 ? alpha - mu : -(sigma_root * sigma_root) / (alpha + mu);
  const double sigma = sigma_root * sigma_root;
  h.beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
  for (std::size_t i = 1; i < c.size(); ++i) h.v[i] = c[i] / v0;
  return h;
}

void householder_apply(const HouseholderReflector& h, std::span<double> c) {
  if (c.size() != h.v.size()) throw DimensionMismatch("householder_apply: segment length mismatch");
  if (h.beta == 0.0) return;
  const double s = h.beta * dot(h.v, c);
  axpy(-s, h.v, c);
}

}  // namespace bminres
