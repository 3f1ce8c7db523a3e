#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bminres/block_vector.hpp"
#include "bminres/laplacian.hpp"

namespace bminres {

/// Right-hand side pairs mixing eigenvectors of the shifted Laplacian.
///
/// Indices refer to the ascending-|eigenvalue| ordering q_1, ..., q_n.
///   SmallSmall: b1 = sum_{i=1}^{100+m} alpha_i q_i,
///               b2 = sum_{i=101-m}^{200} beta_i q_i.
///   SmallLarge: b1 = sum_{i=1}^{200} alpha_i q_i + sum_{i=n-199}^{n-200+m} alpha_i q_i,
///               b2 = sum_{i=201-m}^{200} beta_i q_i + sum_{i=n-199}^{n} beta_i q_i.
/// Coefficients are U(0,1) from a generator seeded with seed + trial.
enum class EigmixMode { SmallSmall, SmallLarge };

const char* to_string(EigmixMode mode);

struct EigmixSpec {
  std::size_t m = 0;
  EigmixMode mode = EigmixMode::SmallSmall;
  std::size_t trials = 100;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when m exceeds 100 (SmallSmall) or 200 (SmallLarge).
  void validate() const;
};

/// The 200 smallest and 200 largest modes that every eigmix pair draws from.
struct EigmixBasis {
  Laplacian2dSpec problem;
  std::vector<LaplacianMode> smallest;  ///< q_1 .. q_200
  std::vector<LaplacianMode> largest;   ///< q_{n-199} .. q_n

  static constexpr std::size_t kBlock = 200;
  /// Throws std::invalid_argument when the grid has fewer than 400 points.
  static EigmixBasis build(const Laplacian2dSpec& problem);
};

/// (b1, b2) for one trial. Deterministic for fixed (spec, trial).
std::pair<Vector, Vector> build_eigmix_rhs(const EigmixSpec& spec, const EigmixBasis& basis, std::size_t trial);

}  // namespace bminres
