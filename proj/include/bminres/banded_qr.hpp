#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "bminres/block_vector.hpp"
#include "bminres/householder.hpp"
#include "bminres/lanczos.hpp"

namespace bminres {

/// Column j of the triangular factor, rows first_row..index, together with the
/// row of the transformed right-hand side it releases.
struct QrColumnUpdate {
  std::size_t index = 0;
  std::size_t first_row = 0;
  std::vector<double> r;  ///< r[k] = R(first_row + k, index); r.back() is the diagonal
  std::vector<double> z;  ///< row `index` of Qbar^T E1 S (one entry per right-hand side)

  double diagonal() const { return r.back(); }
  double at(std::size_t row) const {
    return row < first_row || row > index ? 0.0 : r[row - first_row];
  }
};

/// Progressive QR of the banded Hessenberg matrix. Keeps the 2p most recent
/// Householder reflectors and the live tail of Zbar = Q^T E1 S; everything
/// older has been consumed.
class BandedQr {
 public:
  /// s: the p x p triangular factor of the starting block.
  explicit BandedQr(const BlockVector& s);

  /// Applies the windowed reflectors to the new column, generates the reflector
  /// annihilating its subdiagonal, applies it to Zbar and releases row j.
  /// Throws SingularR if the new diagonal vanishes relative to the column.
  QrColumnUpdate update(const HessenbergColumn& column);

  /// Norms of the live tail rows of Zbar, per right-hand side. These are the
  /// residual norms of the current minimum-residual iterates.
  Vector residual_norms() const;

  std::size_t steps() const { return steps_; }
  std::size_t nrhs() const { return nrhs_; }
  const std::deque<HouseholderReflector>& reflectors() const { return reflectors_; }
  const std::deque<Vector>& zbar_tail() const { return tail_; }

  /// Sum of squares of all released rows plus the live tail; equals ||S||_F^2
  /// up to rounding.
  double energy() const;

 private:
  std::size_t nrhs_;
  std::size_t p_;
  std::size_t steps_ = 0;
  std::deque<HouseholderReflector> reflectors_;
  std::deque<Vector> tail_;  // rows steps_, steps_ + 1, ...
  double consumed_energy_ = 0.0;
};

/// The 2p most recent search directions m_i, with M_j R_j = U_j.
class SearchDirectionWindow {
 public:
  SearchDirectionWindow(std::size_t n, std::size_t capacity) : n_(n), capacity_(capacity) {}

  /// m_j = (u_j - sum_i r_{i,j} m_i) / r_{j,j}. Exact zeros in r skip the
  /// corresponding predecessor.
  std::span<const double> push(std::span<const double> u, const QrColumnUpdate& r);

  std::size_t size() const { return dirs_.size(); }
  /// Number of predecessors the last push actually combined.
  std::size_t last_terms() const { return last_terms_; }

 private:
  struct Entry {
    std::size_t index;
    Vector m;
  };
  std::size_t n_;
  std::size_t capacity_;
  std::deque<Entry> dirs_;
  std::size_t last_terms_ = 0;
};

}  // namespace bminres
