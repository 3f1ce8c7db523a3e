#pragma once

#include "bminres/block_vector.hpp"

namespace bminres {

struct ThinQr {
  BlockVector q;  ///< n x p, orthonormal columns
  BlockVector s;  ///< p x p, upper triangular, nonnegative diagonal
};

/// Relative tolerance below which a diagonal entry of S marks the starting
/// block as rank deficient.
inline constexpr double kStartRankTolerance = 1e-12;

/// Thin QR by modified Gram-Schmidt with one reorthogonalization pass.
/// Throws RankDeficientStart if some diagonal of S falls below
/// kStartRankTolerance times the norm of the corresponding column of F.
ThinQr thin_qr(const BlockVector& f);

}  // namespace bminres
