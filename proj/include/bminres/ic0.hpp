#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bminres/block_vector.hpp"
#include "bminres/csr_matrix.hpp"
#include "bminres/operator.hpp"

namespace bminres {

/// Sparse lower-triangular factor in CSR form, diagonal stored last in each row.
class Ic0Factor {
 public:
  Ic0Factor() = default;
  /// Adopts a lower-triangular CSR (column indices sorted, diagonal last).
  Ic0Factor(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<std::size_t> col_indices,
            std::vector<double> values);

  static Ic0Factor identity(std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t i, std::size_t j) const;

  /// L L^T as a symmetric CSR (full product, not pattern-restricted).
  CsrSymmetricMatrix product() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// Zero-fill incomplete Cholesky: L has exactly the lower sparsity pattern of M
/// and (L L^T)_{ij} = M_{ij} on that pattern. Throws PivotBreakdown on a
/// non-positive pivot.
Ic0Factor ic0_factorize(const CsrSymmetricMatrix& m);

/// Solves L y = b, or L^T y = b when transposed. Throws Error on a zero diagonal.
Vector tri_solve(const Ic0Factor& l, std::span<const double> b, bool transposed);
void tri_solve_inplace(const Ic0Factor& l, std::span<double> b, bool transposed);

/// x -> L^{-1} A L^{-T} x. Solving with this operator and mapping back with
/// solution_recover minimizes the residual in the L^{-1}-weighted norm.
class SplitPreconditionedOperator final : public SymmetricOperator {
 public:
  /// Non-owning: a and l must outlive the operator.
  SplitPreconditionedOperator(const SymmetricOperator& a, const Ic0Factor& l);

  std::size_t dim() const override { return a_->dim(); }
  void apply_one(std::span<const double> x, std::span<double> y) const override;
  BlockVector apply_block(const BlockVector& x) const override;

  /// b -> L^{-1} b, columnwise.
  BlockVector rhs_transform(const BlockVector& b) const;
  /// y -> L^{-T} y, columnwise.
  BlockVector solution_recover(const BlockVector& y) const;
  /// x -> L^T x, the inverse of solution_recover (maps an initial guess in).
  BlockVector solution_transform(const BlockVector& x) const;

 private:
  const SymmetricOperator* a_;
  const Ic0Factor* l_;
};

SplitPreconditionedOperator compose_split(const SymmetricOperator& a, const Ic0Factor& l);

}  // namespace bminres
