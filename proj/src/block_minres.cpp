#include "bminres/block_minres.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>

#include "bminres/errors.hpp"

namespace bminres {

void SolverConfig::validate() const {
  if (!(tol >= 0.0)) throw std::invalid_argument("SolverConfig: tol must be nonnegative");
  if (max_iter == 0) throw std::invalid_argument("SolverConfig: max_iter must be at least 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("SolverConfig: gamma must be positive");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterReached: return "max_iter_reached";
    case SolveStatus::SubspaceExhausted: return "subspace_exhausted";
  }
  return "?";
}

void update_solution(BlockVector& x, std::span<const double> m, std::span<const double> z) {
  for (std::size_t c = 0; c < x.cols(); ++c) {
    if (z[c] != 0.0) axpy(z[c], m, x.col(c));
  }
}

namespace {

Vector true_relative_residuals(const SymmetricOperator& a, const BlockVector& b, const BlockVector& x,
                               const Vector& scale) {
  BlockVector ax = a.apply_block(x);
  Vector out(b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    Vector r(b.rows());
    for (std::size_t i = 0; i < b.rows(); ++i) r[i] = b(i, c) - ax(i, c);
    out[c] = nrm2(r) / scale[c];
  }
  return out;
}

}  // namespace

SolveResult solve(const SymmetricOperator& a, const BlockVector& b, const BlockVector* x0,
                  const SolverConfig& config, const StepObserver& observer) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = a.dim();
  const std::size_t p = b.cols();
  if (b.rows() != n || p == 0) throw DimensionMismatch("solve: right-hand side does not match operator");
  if (x0 != nullptr && (x0->rows() != n || x0->cols() != p)) {
    throw DimensionMismatch("solve: initial guess does not match right-hand side");
  }

  SolveResult result;
  result.x = x0 != nullptr ? *x0 : BlockVector(n, p);
  BlockVector f0 = b;
  if (x0 != nullptr) {
    BlockVector ax = a.apply_block(*x0);
    for (std::size_t k = 0; k < f0.data().size(); ++k) f0.data()[k] -= ax.data()[k];
  }

  Vector scale = b.col_norms();
  const Vector f0_norms = f0.col_norms();
  for (std::size_t c = 0; c < p; ++c) {
    if (scale[c] == 0.0) scale[c] = f0_norms[c];
  }

  const double norm_est = std::max(estimate_norm(a, config.norm_estimate_iterations, config.seed),
                                   std::numeric_limits<double>::min());
  LanczosConfig lc;
  lc.gamma = config.gamma * norm_est;
  lc.policy = config.policy;
  lc.seed = config.seed;
  lc.pool_size = config.replacement_pool;
  lc.reorthogonalize = config.reorthogonalize;
  lc.norm_estimate = norm_est;

  LanczosProcess lanczos(a, f0, lc);
  BandedQr qr(lanczos.s_factor());
  SearchDirectionWindow directions(n, 2 * p);

  ConvergenceHistory& hist = result.history;
  hist.columns = p;
  hist.converged_at.assign(p, std::nullopt);

  auto record = [&](const Vector& abs_norms) {
    Vector rel(p);
    for (std::size_t c = 0; c < p; ++c) {
      rel[c] = abs_norms[c] / scale[c];
      if (!hist.converged_at[c] && rel[c] <= config.tol) hist.converged_at[c] = hist.computed.size();
    }
    hist.computed.push_back(std::move(rel));
  };
  auto all_converged = [&] {
    return std::all_of(hist.computed.back().begin(), hist.computed.back().end(),
                       [&](double r) { return r <= config.tol; });
  };

  record(lanczos.s_factor().col_norms());
  if (config.true_residual_check_every > 0) {
    hist.true_residuals.push_back({0, true_relative_residuals(a, b, result.x, scale)});
  }

  while (!all_converged() && hist.iterations < config.max_iter && !lanczos.exhausted()) {
    StepResult step = lanczos.step();
    const LanczosProcess::BasisVector* created = nullptr;
    if (step.breakdown) {
      lanczos.resolve_breakdown(step);
      hist.breakdowns.push_back(*step.breakdown);
      if (step.breakdown->policy_applied == BreakdownPolicy::RandomReplacement) created = &lanczos.newest();
    } else {
      created = &lanczos.newest();
    }

    const QrColumnUpdate rcol = qr.update(step.column);
    const LanczosProcess::BasisVector* uj = lanczos.find(step.column.global_index);
    if (uj == nullptr) throw std::logic_error("solve: Lanczos vector of the current column was evicted");
    const auto m = directions.push(uj->data, rcol);
    update_solution(result.x, m, rcol.z);

    ++hist.iterations;
    record(qr.residual_norms());
    if (config.true_residual_check_every > 0 && hist.iterations % config.true_residual_check_every == 0) {
      hist.true_residuals.push_back({hist.iterations, true_relative_residuals(a, b, result.x, scale)});
    }
    if (observer) {
      observer(StepTrace{hist.iterations, step.column, rcol, uj->data, m, step.breakdown, created,
                         hist.computed.back(), lanczos, qr});
    }
  }

  if (all_converged()) {
    result.status = SolveStatus::Converged;
  } else if (lanczos.exhausted()) {
    result.status = SolveStatus::SubspaceExhausted;
  } else {
    result.status = SolveStatus::MaxIterReached;
  }
  hist.block_applies = lanczos.block_applies();
  hist.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

SolveResult minres_single(const SymmetricOperator& a, std::span<const double> b, std::span<const double> x0,
                          const SolverConfig& config) {
  BlockVector bb(b.size(), 1);
  bb.set_col(0, b);
  if (x0.empty()) return solve(a, bb, nullptr, config);
  BlockVector xx(x0.size(), 1);
  xx.set_col(0, x0);
  return solve(a, bb, &xx, config);
}

}  // namespace bminres
