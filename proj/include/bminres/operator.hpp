#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "bminres/block_vector.hpp"
#include "bminres/csr_matrix.hpp"

namespace bminres {

/// A symmetric linear operator. Implementations must honour the column
/// independence contract: column i of apply_block(X) equals apply_one(X(:,i))
/// bitwise.
class SymmetricOperator {
 public:
  virtual ~SymmetricOperator() = default;

  virtual std::size_t dim() const = 0;
  virtual void apply_one(std::span<const double> x, std::span<double> y) const = 0;

  /// Default implementation applies column by column.
  virtual BlockVector apply_block(const BlockVector& x) const;

  Vector apply(std::span<const double> x) const;
};

/// Wraps a CSR matrix (non-owning; the matrix must outlive the operator).
class CsrOperator final : public SymmetricOperator {
 public:
  explicit CsrOperator(const CsrSymmetricMatrix& a) : a_(&a) {}

  std::size_t dim() const override { return a_->n(); }
  void apply_one(std::span<const double> x, std::span<double> y) const override;
  BlockVector apply_block(const BlockVector& x) const override;

  const CsrSymmetricMatrix& matrix() const { return *a_; }

 private:
  const CsrSymmetricMatrix* a_;
};

/// Estimate of the 2-norm of a symmetric operator by power iteration on a
/// seeded random start vector.
double estimate_norm(const SymmetricOperator& a, int iterations = 10, std::uint64_t seed = 0);

}  // namespace bminres
