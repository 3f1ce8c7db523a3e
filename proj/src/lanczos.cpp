#include "bminres/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bminres/errors.hpp"
#include "bminres/thin_qr.hpp"

namespace bminres {

namespace {

constexpr std::size_t kNeverRetired = std::numeric_limits<std::size_t>::max();

// Relative norm loss below which a random replacement candidate counts as
// lying in the span of the stored vectors.
constexpr double kReplacementTolerance = 1e-8;

}  // namespace

const char* to_string(BreakdownPolicy policy) {
  switch (policy) {
    case BreakdownPolicy::RandomReplacement: return "replace";
    case BreakdownPolicy::BlockShrink: return "shrink";
  }
  return "?";
}

const char* to_string(DependenceKind kind) {
  switch (kind) {
    case DependenceKind::ExactDependence: return "exact";
    case DependenceKind::NearDependence: return "near";
  }
  return "?";
}

void SubdiagonalCache::push(std::span<const double> subdiagonal) {
  if (subdiagonal.size() != p_) throw DimensionMismatch("SubdiagonalCache::push: expected p entries");
  for (std::size_t l = 0; l + 1 < p_; ++l) {
    for (std::size_t r = 0; r < p_; ++r) c_(r, l) = c_(r, l + 1);
  }
  for (std::size_t r = 0; r < p_; ++r) c_(r, p_ - 1) = subdiagonal[r];
}

LanczosProcess::LanczosProcess(const SymmetricOperator& a, const BlockVector& f0, LanczosConfig config)
    : a_(&a),
      config_(config),
      n_(f0.rows()),
      p_(f0.cols()),
      rng_(config.seed),
      cache_(f0.cols()),
      retired_from_(f0.cols(), kNeverRetired) {
  if (a.dim() != n_) throw DimensionMismatch("LanczosProcess: operator and block dimensions differ");
  if (p_ == 0) throw DimensionMismatch("LanczosProcess: empty starting block");
  ThinQr qr = thin_qr(f0);
  s_ = std::move(qr.s);
  for (std::size_t i = 0; i < p_; ++i) {
    const auto col = qr.q.col(i);
    window_.push_back({i, i, Vector(col.begin(), col.end())});
  }
  next_compact_ = p_;
  next_column_ = 0;
  for (std::size_t k = 0; k < config_.pool_size; ++k) refill_pool();
}

std::size_t LanczosProcess::effective_block_size() const {
  return static_cast<std::size_t>(
      std::count(retired_from_.begin(), retired_from_.end(), kNeverRetired));
}

const LanczosProcess::BasisVector* LanczosProcess::find(std::size_t global) const {
  for (const auto& v : window_) {
    if (v.global == global) return &v;
  }
  return nullptr;
}

Vector LanczosProcess::draw_random() {
  std::normal_distribution<double> normal;
  Vector v(n_);
  for (double& x : v) x = normal(rng_);
  return v;
}

void LanczosProcess::refill_pool() {
  Vector v = draw_random();
  const double norm0 = nrm2(v);
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : window_) axpy(-dot(u.data, v), u.data, v);
    for (const auto& r : retained_) axpy(-dot(r.data, v), r.data, v);
  }
  const double norm = nrm2(v);
  if (norm <= kReplacementTolerance * norm0) return;  // nothing left to draw from
  scal(1.0 / norm, v);
  pool_.push_back(std::move(v));
}

void LanczosProcess::orthogonalize_pool_against(std::span<const double> u) {
  for (auto it = pool_.begin(); it != pool_.end();) {
    axpy(-dot(u, *it), u, *it);
    const double norm = nrm2(*it);
    if (norm <= kReplacementTolerance) {
      it = pool_.erase(it);
      continue;
    }
    scal(1.0 / norm, *it);
    ++it;
  }
}

void LanczosProcess::install(std::size_t global, Vector v) {
  orthogonalize_pool_against(v);
  window_.push_back({global, next_compact_++, std::move(v)});
  while (window_.size() > 2 * p_) window_.pop_front();
}

void LanczosProcess::prefetch_block() {
  if (!next_column_) throw std::logic_error("prefetch_block: Lanczos process exhausted");
  const std::size_t j = *next_column_;
  std::vector<const BasisVector*> block;
  for (std::size_t g = j; g < j + p_; ++g) {
    if (is_retired(g)) continue;
    const BasisVector* v = find(g);
    if (v == nullptr) break;
    block.push_back(v);
  }
  BlockVector x(n_, block.size());
  for (std::size_t k = 0; k < block.size(); ++k) x.set_col(k, block[k]->data);
  w_block_ = a_->apply_block(x);
  ++block_applies_;
  cached_.clear();
  for (std::size_t k = 0; k < block.size(); ++k) cached_.emplace_back(block[k]->global, k);
}

StepResult LanczosProcess::step() {
  if (pending_) throw std::logic_error("LanczosProcess::step: unresolved breakdown");
  if (!next_column_) throw std::logic_error("LanczosProcess::step: process exhausted");
  const std::size_t j = *next_column_;
  if (cached_.empty()) prefetch_block();
  const auto [cached_global, cached_col] = cached_.front();
  if (cached_global != j) throw std::logic_error("LanczosProcess::step: block cache out of sync");
  cached_.pop_front();

  // Retained vectors live until the natural end of their 2p-step reach.
  std::erase_if(retained_, [&](const RetainedVector& r) { return steps_done_ >= r.expiry_iteration; });
  ++steps_done_;

  const auto wcol = w_block_.col(cached_col);
  Vector w(wcol.begin(), wcol.end());

  // Rows of column j: active u_i for i in [j-p, j+p-1], then the candidate j+p.
  std::vector<const BasisVector*> rows;
  const std::size_t lo = j >= p_ ? j - p_ : 0;
  for (std::size_t g = lo; g < j + p_; ++g) {
    if (is_retired(g)) continue;
    const BasisVector* v = find(g);
    if (v == nullptr) throw std::logic_error("LanczosProcess::step: basis vector missing from window");
    rows.push_back(v);
  }

  std::vector<double> h(rows.size(), 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const BasisVector& u = *rows[k];
    // h_{i,j} = h_{j,i} for i < j: read off the antidiagonal, no inner product.
    h[k] = u.global < j ? cache_.antidiagonal(u.global + p_ - j) : dot(u.data, w);
    axpy(-h[k], u.data, w);
  }
  for (const auto& r : retained_) axpy(-dot(r.data, w), r.data, w);
  if (config_.reorthogonalize) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const double c = dot(rows[k]->data, w);
      axpy(-c, rows[k]->data, w);
      h[k] += c;
    }
    for (const auto& r : retained_) axpy(-dot(r.data, w), r.data, w);
  }
  const double h_next = nrm2(w);

  StepResult result;
  HessenbergColumn& col = result.column;
  col.global_index = j;
  col.index = find(j)->compact;
  col.first_row = rows.front()->compact;
  col.entries = h;
  for (const auto* r : rows) col.row_globals.push_back(r->global);
  col.row_globals.push_back(j + p_);
  col.subdiag_norm = h_next;

  const bool dependent = !(h_next >= config_.gamma) || h_next == 0.0;
  if (!dependent) {
    col.entries.push_back(h_next);
    scal(1.0 / h_next, w);
  } else {
    col.entries.push_back(0.0);
    BreakdownEvent ev;
    ev.iteration = steps_done_;
    ev.column = j;
    ev.h_value = h_next;
    ev.kind = h_next <= config_.exact_factor * std::numeric_limits<double>::epsilon() * config_.norm_estimate
                  ? DependenceKind::ExactDependence
                  : DependenceKind::NearDependence;
    ev.policy_applied = config_.policy;
    result.breakdown = ev;
  }

  // Subdiagonal entries h_{j+1,j} .. h_{j+p,j}; retired rows contribute zeros.
  std::vector<double> sub(p_, 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k]->global > j) sub[rows[k]->global - j - 1] = h[k];
  }
  sub[p_ - 1] = col.entries.back();
  cache_.push(sub);

  if (!dependent) {
    install(j + p_, std::move(w));
    advance(j);
  } else {
    pending_ = true;
    pending_candidate_ = std::move(w);
    if (h_next > 0.0) {
      scal(1.0 / h_next, pending_candidate_);
    } else {
      std::fill(pending_candidate_.begin(), pending_candidate_.end(), 0.0);
    }
  }
  return result;
}

void LanczosProcess::advance(std::size_t j) {
  last_column_ = j;
  while (!window_.empty() && window_.front().global + p_ < j + 1) window_.pop_front();
  next_column_.reset();
  for (std::size_t g = j + 1; g <= j + p_; ++g) {
    if (!is_retired(g)) {
      next_column_ = g;
      break;
    }
    // Skipped (retired) columns are zero; keep the cache aligned by global index.
    cache_.push(std::vector<double>(p_, 0.0));
  }
}

void LanczosProcess::resolve_breakdown(StepResult& result) {
  if (!result.breakdown) return;
  BreakdownEvent& ev = *result.breakdown;
  if (ev.kind == DependenceKind::NearDependence) retain_near_dependent(ev);
  if (config_.policy == BreakdownPolicy::RandomReplacement) {
    replace_dependent(ev);
  } else {
    shrink_dependent(ev, result.column);
  }
}

std::span<const double> LanczosProcess::replace_dependent(BreakdownEvent& event) {
  if (!pending_) throw std::logic_error("replace_dependent: no pending breakdown");
  Vector v;
  if (!pool_.empty()) {
    v = std::move(pool_.front());
    pool_.pop_front();
  } else {
    v = draw_random();
  }
  const double norm0 = nrm2(v);
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : window_) axpy(-dot(u.data, v), u.data, v);
    for (const auto& r : retained_) axpy(-dot(r.data, v), r.data, v);
  }
  const double norm = nrm2(v);
  if (!(norm > kReplacementTolerance * norm0)) {
    throw ReplacementExhausted("random replacement vector vanished after orthogonalization at column " +
                               std::to_string(event.column));
  }
  scal(1.0 / norm, v);
  event.policy_applied = BreakdownPolicy::RandomReplacement;
  pending_ = false;
  install(event.column + p_, std::move(v));
  if (pool_.size() < config_.pool_size) refill_pool();
  advance(event.column);
  return newest().data;
}

void LanczosProcess::shrink_dependent(BreakdownEvent& event, HessenbergColumn& column) {
  if (!pending_) throw std::logic_error("shrink_dependent: no pending breakdown");
  const std::size_t retired = event.column + p_;
  retired_from_[retired % p_] = retired;
  if (!column.row_globals.empty() && column.row_globals.back() == retired) {
    column.entries.pop_back();
    column.row_globals.pop_back();
  }
  event.policy_applied = BreakdownPolicy::BlockShrink;
  pending_ = false;
  advance(event.column);
}

void LanczosProcess::retain_near_dependent(const BreakdownEvent& event) {
  if (!pending_) throw std::logic_error("retain_near_dependent: no pending breakdown");
  if (!(event.h_value > 0.0)) return;
  retained_.push_back({event.column + p_, event.iteration + 2 * p_, pending_candidate_});
  orthogonalize_pool_against(retained_.back().data);
}

double LanczosProcess::orthonormality_error() const {
  std::vector<const Vector*> all;
  for (const auto& v : window_) all.push_back(&v.data);
  for (const auto& r : retained_) all.push_back(&r.data);
  double worst = 0.0;
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a; b < all.size(); ++b) {
      const double g = dot(*all[a], *all[b]) - (a == b ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(g));
    }
  }
  return worst;
}

}  // namespace bminres
