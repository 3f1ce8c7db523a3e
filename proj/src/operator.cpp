#include "bminres/operator.hpp"

#include <random>

#include "bminres/errors.hpp"

namespace bminres {

BlockVector SymmetricOperator::apply_block(const BlockVector& x) const {
  if (x.rows() != dim()) throw DimensionMismatch("apply_block: dimension mismatch");
  BlockVector y(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) apply_one(x.col(j), y.col(j));
  return y;
}

Vector SymmetricOperator::apply(std::span<const double> x) const {
  Vector y(dim());
  apply_one(x, y);
  return y;
}

void CsrOperator::apply_one(std::span<const double> x, std::span<double> y) const {
  csr_matvec(*a_, x, y);
}

BlockVector CsrOperator::apply_block(const BlockVector& x) const { return csr_block_matvec(*a_, x); }

double estimate_norm(const SymmetricOperator& a, int iterations, std::uint64_t seed) {
  const std::size_t n = a.dim();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector x(n);
  for (double& v : x) v = normal(rng);
  scal(1.0 / nrm2(x), x);
  Vector y(n);
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    a.apply_one(x, y);
    estimate = nrm2(y);
    if (estimate == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / estimate;
  }
  return estimate;
}

}  // namespace bminres
