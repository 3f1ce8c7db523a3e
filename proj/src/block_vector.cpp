#include "bminres/block_vector.hpp"

#include <algorithm>
#include <cmath>

#include "bminres/errors.hpp"

namespace bminres {

BlockVector BlockVector::from_columns(const std::vector<Vector>& columns) {
  if (columns.empty()) return {};
  BlockVector out(columns.front().size(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) out.set_col(j, columns[j]);
  return out;
}

void BlockVector::set_col(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) throw DimensionMismatch("set_col: length mismatch");
  std::copy(values.begin(), values.end(), col(j).begin());
}

Vector BlockVector::col_norms() const {
  Vector out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = nrm2(col(j));
  return out;
}

double BlockVector::frobenius_norm() const { return nrm2(data_); }

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// Scaled accumulation so that tiny and huge entries do not under/overflow.
double nrm2(std::span<const double> x) {
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scal(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

}  // namespace bminres
