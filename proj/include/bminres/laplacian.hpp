#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bminres/block_vector.hpp"
#include "bminres/csr_matrix.hpp"

namespace bminres {

/// Central-difference Laplacian on a g x g interior grid with mesh width
/// h = 1/(g-1). Grid point (r, c) has index r*g + c.
struct Laplacian2dSpec {
  std::size_t grid = 200;
  double sigma = 200.0;  ///< shift in A = -L - sigma I

  double h() const { return 1.0 / static_cast<double>(grid - 1); }
  std::size_t n() const { return grid * grid; }
  /// Throws std::invalid_argument when grid < 2.
  void validate() const;
};

/// L = h^-2 (I kron T + T kron I), T = tridiag(1, -2, 1). Negative definite.
CsrSymmetricMatrix build_laplacian_2d(const Laplacian2dSpec& spec);

/// A = -L - sigma I.
CsrSymmetricMatrix build_shifted_laplacian_2d(const Laplacian2dSpec& spec);

/// One Dirichlet mode q = s_a kron s_b with s_k(i) = sqrt(2/(g+1)) sin((i+1) k pi / (g+1)),
/// a, b in 1..g.
struct LaplacianMode {
  std::size_t a = 1;
  std::size_t b = 1;
  double laplacian_eigenvalue = 0.0;  ///< eigenvalue of L
  double shifted_eigenvalue = 0.0;    ///< eigenvalue of A = -L - sigma I
};

enum class EigenEnd { Smallest, Largest };

/// Modes of the full spectrum sorted ascending by |shifted_eigenvalue|, ties
/// broken by (a, b). Smallest returns the first `count`; Largest returns the
/// last `count`, still in ascending order, so position k of the Largest list
/// is global position n - count + k.
std::vector<LaplacianMode> laplacian_modes(const Laplacian2dSpec& spec, std::size_t count, EigenEnd which);

/// Unit-norm eigenvector of `mode`.
Vector mode_vector(const Laplacian2dSpec& spec, const LaplacianMode& mode);

/// out += coeff * mode_vector(spec, mode), without materializing the vector.
void accumulate_mode(const Laplacian2dSpec& spec, const LaplacianMode& mode, double coeff, std::span<double> out);

struct Eigenpair {
  LaplacianMode mode;
  Vector q;
};

/// Materialized eigenpairs in the order of laplacian_modes. Throws
/// std::invalid_argument when count > n.
std::vector<Eigenpair> laplacian_eigenpairs(const Laplacian2dSpec& spec, std::size_t count, EigenEnd which);

}  // namespace bminres
