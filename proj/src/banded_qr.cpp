#include "bminres/banded_qr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bminres/errors.hpp"

namespace bminres {

BandedQr::BandedQr(const BlockVector& s) : nrhs_(s.cols()), p_(s.rows()) {
  for (std::size_t i = 0; i < s.rows(); ++i) {
    Vector row(nrhs_);
    for (std::size_t c = 0; c < nrhs_; ++c) row[c] = s(i, c);
    tail_.push_back(std::move(row));
  }
}

QrColumnUpdate BandedQr::update(const HessenbergColumn& column) {
  const std::size_t j = column.index;
  if (j != steps_) throw std::logic_error("BandedQr::update: columns must arrive in order");
  if (column.entries.empty() || column.first_row > j || column.last_row() < j) {
    throw std::logic_error("BandedQr::update: column does not contain its diagonal");
  }
  const std::size_t hi = column.last_row();
  std::size_t lo = column.first_row;
  if (!reflectors_.empty()) lo = std::min(lo, reflectors_.front().offset);

  Vector seg(hi - lo + 1, 0.0);
  std::copy(column.entries.begin(), column.entries.end(),
            seg.begin() + static_cast<std::ptrdiff_t>(column.first_row - lo));

  for (const auto& h : reflectors_) {
    if (h.offset + h.length() - 1 > hi) throw std::logic_error("BandedQr::update: reflector beyond column");
    householder_apply(h, std::span<double>(seg).subspan(h.offset - lo, h.length()));
  }

  HouseholderReflector h = householder_generate(std::span<const double>(seg).subspan(j - lo));
  h.offset = j;
  householder_apply(h, std::span<double>(seg).subspan(j - lo));
  std::fill(seg.begin() + static_cast<std::ptrdiff_t>(j - lo + 1), seg.end(), 0.0);

  const double col_norm = nrm2(column.entries);
  const double diag = seg[j - lo];
  if (!(std::abs(diag) >= 1e-14 * col_norm) || col_norm == 0.0) {
    throw SingularR("triangular factor is singular at column " + std::to_string(j));
  }

  // Extend the live tail with zero rows (the E1 padding) and rotate it.
  while (steps_ + tail_.size() <= hi) tail_.emplace_back(nrhs_, 0.0);
  Vector seg_z(h.length());
  for (std::size_t c = 0; c < nrhs_; ++c) {
    for (std::size_t k = 0; k < h.length(); ++k) seg_z[k] = tail_[k][c];
    householder_apply(h, seg_z);
    for (std::size_t k = 0; k < h.length(); ++k) tail_[k][c] = seg_z[k];
  }

  reflectors_.push_back(std::move(h));
  while (reflectors_.size() > 2 * p_) reflectors_.pop_front();

  QrColumnUpdate out;
  out.index = j;
  out.first_row = lo;
  out.r.assign(seg.begin(), seg.begin() + static_cast<std::ptrdiff_t>(j - lo + 1));
  out.z = std::move(tail_.front());
  tail_.pop_front();
  for (double v : out.z) consumed_energy_ += v * v;
  ++steps_;
  return out;
}

Vector BandedQr::residual_norms() const {
  Vector out(nrhs_);
  Vector col(tail_.size());
  for (std::size_t c = 0; c < nrhs_; ++c) {
    for (std::size_t k = 0; k < tail_.size(); ++k) col[k] = tail_[k][c];
    out[c] = nrm2(col);
  }
  return out;
}

double BandedQr::energy() const {
  double e = consumed_energy_;
  for (const auto& row : tail_) {
    for (double v : row) e += v * v;
  }
  return e;
}

std::span<const double> SearchDirectionWindow::push(std::span<const double> u, const QrColumnUpdate& r) {
  if (u.size() != n_) throw DimensionMismatch("SearchDirectionWindow::push: length mismatch");
  Vector m(u.begin(), u.end());
  last_terms_ = 0;
  for (const auto& e : dirs_) {
    if (e.index < r.first_row || e.index >= r.index) continue;
    const double coef = r.at(e.index);
    if (coef == 0.0) continue;
    axpy(-coef, e.m, m);
    ++last_terms_;
  }
  const double diag = r.diagonal();
  if (diag == 0.0) throw SingularR("search direction: zero diagonal");
  scal(1.0 / diag, m);
  dirs_.push_back({r.index, std::move(m)});
  while (dirs_.size() > capacity_) dirs_.pop_front();
  return dirs_.back().m;
}

}  // namespace bminres
