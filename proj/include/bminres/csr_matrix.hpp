#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bminres/block_vector.hpp"

namespace bminres {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Sparse symmetric matrix in compressed-row form. Both triangles are stored,
/// so a product is a plain row sweep.
class CsrSymmetricMatrix {
 public:
  CsrSymmetricMatrix() = default;

  /// Takes ownership of raw CSR arrays and validates the structural invariants
  /// (offsets, sorted unique column indices, symmetry).
  CsrSymmetricMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                     std::vector<std::size_t> col_indices, std::vector<double> values);

  /// Assembles from triplets. Duplicates are summed. The triplets must already
  /// describe a symmetric matrix (both triangles present); throws NotSymmetric
  /// otherwise.
  static CsrSymmetricMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

  static CsrSymmetricMatrix identity(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Entry lookup by binary search in the row; zero when not stored.
  double at(std::size_t i, std::size_t j) const;

  /// Explicit transpose (as a general CSR with the same layout conventions).
  CsrSymmetricMatrix transpose_unchecked() const;

  /// Structural and numerical equality of the stored arrays.
  bool operator==(const CsrSymmetricMatrix& other) const = default;

  /// Returns A + shift * I (diagonal entries are inserted when missing).
  CsrSymmetricMatrix shifted(double shift) const;
  /// Returns scale * A.
  CsrSymmetricMatrix scaled(double scale) const;

  double frobenius_norm() const;

  std::vector<Triplet> to_triplets() const;

 private:
  struct Unchecked {};
  CsrSymmetricMatrix(Unchecked, std::size_t n, std::vector<std::size_t> row_offsets,
                     std::vector<std::size_t> col_indices, std::vector<double> values);
  void validate_layout() const;
  void validate_symmetry() const;

  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

Vector csr_matvec(const CsrSymmetricMatrix& a, std::span<const double> x);
void csr_matvec(const CsrSymmetricMatrix& a, std::span<const double> x, std::span<double> y);
BlockVector csr_block_matvec(const CsrSymmetricMatrix& a, const BlockVector& x);

}  // namespace bminres
