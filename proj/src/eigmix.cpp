#include "bminres/eigmix.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace bminres {

const char* to_string(EigmixMode mode) {
  return mode == EigmixMode::SmallSmall ? "small-small" : "small-large";
}

void EigmixSpec::validate() const {
  const std::size_t cap = mode == EigmixMode::SmallSmall ? 100 : 200;
  if (m > cap) {
    throw std::invalid_argument(std::string("EigmixSpec: m must be at most ") + std::to_string(cap) + " for " +
                                to_string(mode));
  }
}

EigmixBasis EigmixBasis::build(const Laplacian2dSpec& problem) {
  if (problem.n() < 2 * kBlock) throw std::invalid_argument("EigmixBasis: grid too small for 400 distinct modes");
  EigmixBasis basis;
  basis.problem = problem;
  basis.smallest = laplacian_modes(problem, kBlock, EigenEnd::Smallest);
  basis.largest = laplacian_modes(problem, kBlock, EigenEnd::Largest);
  return basis;
}

std::pair<Vector, Vector> build_eigmix_rhs(const EigmixSpec& spec, const EigmixBasis& basis, std::size_t trial) {
  spec.validate();
  const std::size_t n = basis.problem.n();
  const std::size_t m = spec.m;
  std::mt19937_64 rng(spec.seed + trial);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Vector b1(n, 0.0);
  Vector b2(n, 0.0);
  // Index ranges are 0-based positions within basis.smallest / basis.largest.
  auto mix = [&](Vector& b, const std::vector<LaplacianMode>& modes, std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) accumulate_mode(basis.problem, modes[i], unif(rng), b);
  };
  if (spec.mode == EigmixMode::SmallSmall) {
    mix(b1, basis.smallest, 0, 100 + m);
    mix(b2, basis.smallest, 100 - m, 200);
  } else {
    mix(b1, basis.smallest, 0, 200);
    mix(b1, basis.largest, 0, m);
    mix(b2, basis.smallest, 200 - m, 200);
    mix(b2, basis.largest, 0, 200);
  }
  return {std::move(b1), std::move(b2)};
}

}  // namespace bminres
