#include "bminres/thin_qr.hpp"

#include "bminres/errors.hpp"

namespace bminres {

ThinQr thin_qr(const BlockVector& f) {
  const std::size_t n = f.rows();
  const std::size_t p = f.cols();
  if (p > n) throw DimensionMismatch("thin_qr: more columns than rows");

  ThinQr out{f, BlockVector(p, p)};
  BlockVector& q = out.q;
  BlockVector& s = out.s;
  const Vector col_norms = f.col_norms();

  for (std::size_t j = 0; j < p; ++j) {
    auto qj = q.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const double c = dot(q.col(i), qj);
        axpy(-c, q.col(i), qj);
        s(i, j) += c;
      }
    }
    const double d = nrm2(qj);
    if (col_norms[j] == 0.0 || d <= kStartRankTolerance * col_norms[j]) {
      throw RankDeficientStart(j, d, col_norms[j]);
    }
    s(j, j) = d;
    scal(1.0 / d, qj);
  }
  return out;
}

}  // namespace bminres
