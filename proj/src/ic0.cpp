#include "bminres/ic0.hpp"

#include <algorithm>
#include <cmath>

#include "bminres/errors.hpp"

namespace bminres {

Ic0Factor::Ic0Factor(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<std::size_t> col_indices,
                     std::vector<double> values)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != n_ + 1 || row_offsets_.back() != values_.size() ||
      col_indices_.size() != values_.size()) {
    throw DimensionMismatch("Ic0Factor: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t first = row_offsets_[i];
    const std::size_t last = row_offsets_[i + 1];
    if (first == last || col_indices_[last - 1] != i) {
      throw DimensionMismatch("Ic0Factor: row " + std::to_string(i) + " must end with its diagonal");
    }
    for (std::size_t k = first + 1; k < last; ++k) {
      if (col_indices_[k] <= col_indices_[k - 1]) throw DimensionMismatch("Ic0Factor: unsorted row");
    }
  }
}

Ic0Factor Ic0Factor::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  return Ic0Factor(n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

double Ic0Factor::at(std::size_t i, std::size_t j) const {
  const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

CsrSymmetricMatrix Ic0Factor::product() const {
  // (L L^T)_{ij} = sum_k L_ik L_jk: merge rows i and j.
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      std::size_t a = row_offsets_[i];
      std::size_t b = row_offsets_[j];
      double s = 0.0;
      bool touched = false;
      while (a < row_offsets_[i + 1] && b < row_offsets_[j + 1]) {
        if (col_indices_[a] == col_indices_[b]) {
          s += values_[a++] * values_[b++];
          touched = true;
        } else if (col_indices_[a] < col_indices_[b]) {
          ++a;
        } else {
          ++b;
        }
      }
      if (touched) triplets.push_back({i, j, s});
    }
  }
  return CsrSymmetricMatrix::from_triplets(n_, std::move(triplets));
}

Ic0Factor ic0_factorize(const CsrSymmetricMatrix& m) {
  const std::size_t n = m.n();
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();

  std::vector<std::size_t> l_offsets(n + 1, 0);
  std::vector<std::size_t> l_cols;
  std::vector<double> l_vals;
  for (std::size_t i = 0; i < n; ++i) {
    bool has_diag = false;
    for (std::size_t k = offsets[i]; k < offsets[i + 1] && cols[k] <= i; ++k) {
      l_cols.push_back(cols[k]);
      l_vals.push_back(vals[k]);
      has_diag = has_diag || cols[k] == i;
    }
    if (!has_diag) throw PivotBreakdown(i, 0.0);
    l_offsets[i + 1] = l_cols.size();
  }

  // Row-oriented left-looking sweep restricted to the pattern:
  // L_ik = (M_ik - sum_{c<k} L_ic L_kc) / L_kk,  L_ii = sqrt(M_ii - sum_{c<i} L_ic^2).
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row_first = l_offsets[i];
    const std::size_t row_last = l_offsets[i + 1];
    for (std::size_t t = row_first; t < row_last; ++t) {
      const std::size_t k = l_cols[t];
      double s = l_vals[t];
      std::size_t a = row_first;
      std::size_t b = l_offsets[k];
      const std::size_t b_last = l_offsets[k + 1] - 1;  // skip L_kk
      while (a < t && b < b_last) {
        if (l_cols[a] == l_cols[b]) {
          s -= l_vals[a++] * l_vals[b++];
        } else if (l_cols[a] < l_cols[b]) {
          ++a;
        } else {
          ++b;
        }
      }
      if (k == i) {
        if (!(s > 0.0)) throw PivotBreakdown(i, s);
        l_vals[t] = std::sqrt(s);
      } else {
        l_vals[t] = s / l_vals[l_offsets[k + 1] - 1];
      }
    }
  }
  return Ic0Factor(n, std::move(l_offsets), std::move(l_cols), std::move(l_vals));
}

void tri_solve_inplace(const Ic0Factor& l, std::span<double> b, bool transposed) {
  const std::size_t n = l.n();
  if (b.size() != n) throw DimensionMismatch("tri_solve: dimension mismatch");
  const auto offsets = l.row_offsets();
  const auto cols = l.col_indices();
  const auto vals = l.values();
  if (!transposed) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t diag = offsets[i + 1] - 1;
      double s = b[i];
      for (std::size_t k = offsets[i]; k < diag; ++k) s -= vals[k] * b[cols[k]];
      if (vals[diag] == 0.0) throw Error("tri_solve: zero diagonal at row " + std::to_string(i));
      b[i] = s / vals[diag];
    }
  } else {
    for (std::size_t i = n; i-- > 0;) {
      const std::size_t diag = offsets[i + 1] - 1;
      if (vals[diag] == 0.0) throw Error("tri_solve: zero diagonal at row " + std::to_string(i));
      b[i] /= vals[diag];
      const double yi = b[i];
      for (std::size_t k = offsets[i]; k < diag; ++k) b[cols[k]] -= vals[k] * yi;
    }
  }
}

Vector tri_solve(const Ic0Factor& l, std::span<const double> b, bool transposed) {
  Vector y(b.begin(), b.end());
  tri_solve_inplace(l, y, transposed);
  return y;
}

SplitPreconditionedOperator::SplitPreconditionedOperator(const SymmetricOperator& a, const Ic0Factor& l)
    : a_(&a), l_(&l) {
  if (a.dim() != l.n()) throw DimensionMismatch("compose_split: operator and factor dimensions differ");
}

void SplitPreconditionedOperator::apply_one(std::span<const double> x, std::span<double> y) const {
  Vector t(x.begin(), x.end());
  tri_solve_inplace(*l_, t, true);
  a_->apply_one(t, y);
  tri_solve_inplace(*l_, y, false);
}

BlockVector SplitPreconditionedOperator::apply_block(const BlockVector& x) const {
  BlockVector t = solution_recover(x);
  BlockVector y = a_->apply_block(t);
  for (std::size_t c = 0; c < y.cols(); ++c) tri_solve_inplace(*l_, y.col(c), false);
  return y;
}

BlockVector SplitPreconditionedOperator::rhs_transform(const BlockVector& b) const {
  BlockVector out = b;
  for (std::size_t c = 0; c < out.cols(); ++c) tri_solve_inplace(*l_, out.col(c), false);
  return out;
}

BlockVector SplitPreconditionedOperator::solution_recover(const BlockVector& y) const {
  BlockVector out = y;
  for (std::size_t c = 0; c < out.cols(); ++c) tri_solve_inplace(*l_, out.col(c), true);
  return out;
}

BlockVector SplitPreconditionedOperator::solution_transform(const BlockVector& x) const {
  const auto offsets = l_->row_offsets();
  const auto cols = l_->col_indices();
  const auto vals = l_->values();
  BlockVector out(x.rows(), x.cols());
  // (L^T x)_k = sum_i L_ik x_i
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < l_->n(); ++i) {
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) out(cols[k], c) += vals[k] * x(i, c);
    }
  }
  return out;
}

SplitPreconditionedOperator compose_split(const SymmetricOperator& a, const Ic0Factor& l) {
  return SplitPreconditionedOperator(a, l);
}

}  // namespace bminres
