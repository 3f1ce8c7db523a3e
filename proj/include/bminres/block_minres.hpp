#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bminres/banded_qr.hpp"
#include "bminres/block_vector.hpp"
#include "bminres/lanczos.hpp"
#include "bminres/operator.hpp"

namespace bminres {

struct SolverConfig {
  double tol = 1e-8;             ///< per-column target for ||b_i - A x_i|| / ||b_i||
  std::size_t max_iter = 1000;   ///< cap on banded Lanczos steps
  double gamma = 1e-8;           ///< dependence tolerance, relative to an estimate of ||A||
  BreakdownPolicy policy = BreakdownPolicy::RandomReplacement;
  std::uint64_t seed = 0;
  std::size_t replacement_pool = 1;
  bool reorthogonalize = true;
  std::size_t true_residual_check_every = 0;  ///< 0 = never
  int norm_estimate_iterations = 10;

  /// Throws std::invalid_argument on a negative tol or max_iter == 0.
  /// tol == 0 runs to max_iter.
  void validate() const;
};

enum class SolveStatus {
  Converged,          ///< every column met tol
  MaxIterReached,     ///< max_iter steps done, some column above tol
  SubspaceExhausted,  ///< shrink policy retired every index chain before tol was met
};

const char* to_string(SolveStatus status);

struct TrueResidualSample {
  std::size_t iteration;
  Vector relative;  ///< ||b_i - A x_i|| / ||b_i|| per column
};

struct ConvergenceHistory {
  std::size_t columns = 0;
  /// computed[j][i]: computed relative residual of column i after j steps
  /// (j = 0 is the starting residual).
  std::vector<Vector> computed;
  std::vector<TrueResidualSample> true_residuals;
  std::vector<BreakdownEvent> breakdowns;
  std::vector<std::optional<std::size_t>> converged_at;  ///< first iteration at or below tol
  std::size_t iterations = 0;
  std::size_t block_applies = 0;
  double wall_seconds = 0.0;

  bool column_converged(std::size_t i) const { return converged_at[i].has_value(); }
};

struct SolveResult {
  BlockVector x;
  ConvergenceHistory history;
  SolveStatus status = SolveStatus::MaxIterReached;
};

/// Everything produced by one iteration, handed to an optional observer.
struct StepTrace {
  std::size_t iteration;
  const HessenbergColumn& column;
  const QrColumnUpdate& r;
  std::span<const double> u;  ///< Lanczos vector of this column
  std::span<const double> m;  ///< search direction of this column
  const std::optional<BreakdownEvent>& breakdown;
  /// Basis vector appended this step (accepted candidate or replacement);
  /// null when the candidate was dropped.
  const LanczosProcess::BasisVector* new_vector;
  const Vector& computed_relative;
  const LanczosProcess& lanczos;
  const BandedQr& qr;
};

using StepObserver = std::function<void(const StepTrace&)>;

/// Block MINRES on the banded Lanczos basis. Each column of the returned X
/// minimizes ||b_i - A x|| over x0_i + K_{k,m}(A, F0), j = (k-1)p + m.
/// x0 == nullptr means a zero initial guess.
SolveResult solve(const SymmetricOperator& a, const BlockVector& b, const BlockVector* x0,
                  const SolverConfig& config, const StepObserver& observer = {});

/// Single right-hand side MINRES; the same code path as solve() with p = 1.
SolveResult minres_single(const SymmetricOperator& a, std::span<const double> b,
                          std::span<const double> x0, const SolverConfig& config);

/// X <- X + m z^T.
void update_solution(BlockVector& x, std::span<const double> m, std::span<const double> z);

}  // namespace bminres
