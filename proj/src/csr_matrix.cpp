#include "bminres/csr_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bminres/errors.hpp"

namespace bminres {

CsrSymmetricMatrix::CsrSymmetricMatrix(std::size_t n, std::vector<std::size_t> row_offsets,
                                       std::vector<std::size_t> col_indices,
                                       std::vector<double> values)
    : CsrSymmetricMatrix(Unchecked{}, n, std::move(row_offsets), std::move(col_indices),
                         std::move(values)) {
  validate_layout();
  validate_symmetry();
}

CsrSymmetricMatrix::CsrSymmetricMatrix(Unchecked, std::size_t n,
                                       std::vector<std::size_t> row_offsets,
                                       std::vector<std::size_t> col_indices,
                                       std::vector<double> values)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {}

void CsrSymmetricMatrix::validate_layout() const {
  if (row_offsets_.size() != n_ + 1) throw DimensionMismatch("CSR: row_offsets must have n+1 entries");
  if (row_offsets_.front() != 0) throw DimensionMismatch("CSR: row_offsets[0] must be 0");
  if (row_offsets_.back() != values_.size() || col_indices_.size() != values_.size()) {
    throw DimensionMismatch("CSR: row_offsets[n] must equal the number of stored values");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) throw DimensionMismatch("CSR: row_offsets decreasing");
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= n_) throw DimensionMismatch("CSR: column index out of range");
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
        throw DimensionMismatch("CSR: column indices not strictly increasing in row " +
                                std::to_string(i));
      }
    }
  }
}

void CsrSymmetricMatrix::validate_symmetry() const {
  if (!(transpose_unchecked() == *this)) throw NotSymmetric("CSR matrix is not symmetric");
}

CsrSymmetricMatrix CsrSymmetricMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= n || t.col >= n) throw DimensionMismatch("triplet index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  return CsrSymmetricMatrix(n, std::move(offsets), std::move(cols), std::move(vals));
}

CsrSymmetricMatrix CsrSymmetricMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  return CsrSymmetricMatrix(Unchecked{}, n, std::move(offsets), std::move(cols),
                            std::vector<double>(n, 1.0));
}

double CsrSymmetricMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

CsrSymmetricMatrix CsrSymmetricMatrix::transpose_unchecked() const {
  std::vector<std::size_t> offsets(n_ + 1, 0);
  for (std::size_t c : col_indices_) ++offsets[c + 1];
  for (std::size_t i = 0; i < n_; ++i) offsets[i + 1] += offsets[i];
  std::vector<std::size_t> cols(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t dst = cursor[col_indices_[k]]++;
      cols[dst] = i;
      vals[dst] = values_[k];
    }
  }
  return CsrSymmetricMatrix(Unchecked{}, n_, std::move(offsets), std::move(cols), std::move(vals));
}

CsrSymmetricMatrix CsrSymmetricMatrix::shifted(double shift) const {
  auto triplets = to_triplets();
  for (std::size_t i = 0; i < n_; ++i) triplets.push_back({i, i, shift});
  return from_triplets(n_, std::move(triplets));
}

CsrSymmetricMatrix CsrSymmetricMatrix::scaled(double scale) const {
  auto vals = values_;
  for (double& v : vals) v *= scale;
  return CsrSymmetricMatrix(Unchecked{}, n_, row_offsets_, col_indices_, std::move(vals));
}

double CsrSymmetricMatrix::frobenius_norm() const { return nrm2(values_); }

std::vector<Triplet> CsrSymmetricMatrix::to_triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      out.push_back({i, col_indices_[k], values_[k]});
    }
  }
  return out;
}

void csr_matvec(const CsrSymmetricMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.n() || y.size() != a.n()) throw DimensionMismatch("csr_matvec: dimension mismatch");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.n(); ++i) {
    double acc = 0.0;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) acc += vals[k] * x[cols[k]];
    y[i] = acc;
  }
}

Vector csr_matvec(const CsrSymmetricMatrix& a, std::span<const double> x) {
  Vector y(a.n());
  csr_matvec(a, x, y);
  return y;
}

// One sweep over the matrix for all columns. Each column accumulates in the
// same order as csr_matvec, so the result is bitwise identical to p single
// products.
BlockVector csr_block_matvec(const CsrSymmetricMatrix& a, const BlockVector& x) {
  if (x.rows() != a.n()) throw DimensionMismatch("csr_block_matvec: dimension mismatch");
  const std::size_t p = x.cols();
  BlockVector y(a.n(), p);
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  std::vector<double> acc(p);
  for (std::size_t i = 0; i < a.n(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      const double v = vals[k];
      const std::size_t c = cols[k];
      for (std::size_t j = 0; j < p; ++j) acc[j] += v * x(c, j);
    }
    for (std::size_t j = 0; j < p; ++j) y(i, j) = acc[j];
  }
  return y;
}

}  // namespace bminres
