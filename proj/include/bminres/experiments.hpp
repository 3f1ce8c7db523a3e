#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bminres/block_minres.hpp"
#include "bminres/csr_matrix.hpp"
#include "bminres/eigmix.hpp"
#include "bminres/ic0.hpp"
#include "bminres/laplacian.hpp"
#include "bminres/operator.hpp"

namespace bminres {

/// A matrix together with an optional split IC(0) preconditioner built from
/// a (possibly different) SPD matrix. Owns everything it points to; movable,
/// not copyable.
class PreparedSystem {
 public:
  /// No preconditioning when `precond_source` is empty.
  PreparedSystem(CsrSymmetricMatrix a, std::optional<CsrSymmetricMatrix> precond_source);

  /// The shifted Laplacian A = -L - sigma I, optionally preconditioned with IC(0) of -L.
  static PreparedSystem shifted_laplacian(const Laplacian2dSpec& spec, bool precondition);

  std::size_t n() const { return a_->n(); }
  bool preconditioned() const { return split_ != nullptr; }
  const CsrSymmetricMatrix& matrix() const { return *a_; }
  const SymmetricOperator& original() const { return *op_; }
  /// The operator the solver sees: L^-1 A L^-T, or A itself.
  const SymmetricOperator& solver_operator() const;
  const Ic0Factor* factor() const { return factor_.get(); }

  BlockVector transform_rhs(const BlockVector& b) const;
  BlockVector recover_solution(const BlockVector& y) const;
  /// M^-1 v with M = L L^T (identity when unpreconditioned).
  Vector apply_preconditioner_inverse(std::span<const double> v) const;

  /// Block solve of A X = B through the split form. The history records
  /// residuals of the transformed system; X is in original coordinates.
  SolveResult solve(const BlockVector& b, const SolverConfig& config) const;

 private:
  std::unique_ptr<CsrSymmetricMatrix> a_;
  std::unique_ptr<CsrOperator> op_;
  std::unique_ptr<Ic0Factor> factor_;
  std::unique_ptr<SplitPreconditionedOperator> split_;
};

/// One block run next to p independent single-vector runs on the same columns.
struct ComparisonRun {
  std::string experiment;
  SolveResult block;
  std::vector<SolveResult> sequential;

  std::size_t sequential_total() const;
  double sequential_seconds() const;
};

ComparisonRun run_comparison(const std::string& experiment, const PreparedSystem& system, const BlockVector& b,
                             const SolverConfig& config);

/// k right-hand sides with U(0,1) entries from a generator seeded with `seed`.
BlockVector random_rhs(std::size_t n, std::size_t k, std::uint64_t seed);
/// [ones, e_1, ..., e_{p-1}].
BlockVector ones_identity_rhs(std::size_t n, std::size_t p);
/// b1 = e_1 and b2 = A M^-1 e_1, so the transformed pair satisfies b2 = A b1.
BlockVector dependent_pair_rhs(const PreparedSystem& system);

struct ExperimentOptions {
  Laplacian2dSpec problem;
  SolverConfig solver;
  bool precondition = true;
};

ComparisonRun fig1(const ExperimentOptions& opt, std::size_t k = 10);
ComparisonRun fig3(const ExperimentOptions& opt);
/// Left: (e_1, ones). Right: (e_1, e_2).
ComparisonRun fig4(const ExperimentOptions& opt, bool right);

struct RatioRow {
  std::size_t p;
  std::size_t block_iterations;
  std::size_t sequential_iterations;
  double ratio;
};

/// Block vs sequential iterations for p = 1..p_max with the ones+identity recipe.
std::vector<RatioRow> fig2(const ExperimentOptions& opt, std::size_t p_max = 10);

struct EigmixRow {
  std::size_t m;
  std::size_t trials;
  double avg_block_iterations;
  double avg_sequential_iterations;
  double avg_block_seconds;
  double avg_sequential_seconds;
};

/// Averages over `trials` eigmix pairs per m. Trials run on up to `threads`
/// threads; results do not depend on the thread count.
std::vector<EigmixRow> eigmix_experiment(const ExperimentOptions& opt, EigmixMode mode,
                                         const std::vector<std::size_t>& ms, std::size_t trials,
                                         std::uint64_t seed, std::size_t threads);

/// Parallel-trial cap from BLOCK_MINRES_THREADS (hardware concurrency when unset).
std::size_t thread_cap_from_env();

// CSV output. Every file starts with "# bminres-csv v1" and "# meta: key=value"
// lines, then a header row and data rows.

using MetaList = std::vector<std::pair<std::string, std::string>>;

/// experiment,iteration,column,computed_rel_resid[,true_rel_resid]
/// Rows for iterations 1..J of each run; true residuals only when every
/// iteration was audited.
void write_history_csv(std::ostream& out, const MetaList& meta,
                       const std::vector<std::pair<std::string, const SolveResult*>>& runs);
void write_comparison_csv(std::ostream& out, const MetaList& meta, const ComparisonRun& run, bool with_timing);
void write_ratio_csv(std::ostream& out, const MetaList& meta, const std::vector<RatioRow>& rows);
void write_eigmix_csv(std::ostream& out, const MetaList& meta, const std::vector<EigmixRow>& rows,
                      bool with_timing);

/// Meta entries describing a run: iterations, status, breakdown events and,
/// when requested, wall seconds.
MetaList run_meta(const std::string& prefix, const SolveResult& r, bool with_timing);

}  // namespace bminres
