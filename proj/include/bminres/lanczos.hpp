#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "bminres/block_vector.hpp"
#include "bminres/operator.hpp"

namespace bminres {

/// What to do when a candidate basis vector turns out (nearly) dependent.
enum class BreakdownPolicy {
  RandomReplacement,  ///< install a random vector orthogonal to the basis; block size kept
  BlockShrink,        ///< drop the candidate and retire its index chain; block size shrinks
};

enum class DependenceKind { ExactDependence, NearDependence };

const char* to_string(BreakdownPolicy policy);
const char* to_string(DependenceKind kind);

struct BreakdownEvent {
  std::size_t iteration = 0;  ///< 1-based step count at which the candidate was rejected
  std::size_t column = 0;     ///< global index j of the Hessenberg column
  DependenceKind kind = DependenceKind::ExactDependence;
  double h_value = 0.0;  ///< the rejected h_{j+p,j}
  BreakdownPolicy policy_applied = BreakdownPolicy::RandomReplacement;
};

/// One column of the banded Hessenberg matrix. Rows are addressed by compact
/// index (position among the basis vectors actually kept); global indices are
/// never renumbered and are carried alongside.
struct HessenbergColumn {
  std::size_t global_index = 0;
  std::size_t index = 0;      ///< compact column index (== compact index of u_j)
  std::size_t first_row = 0;  ///< compact row index of entries[0]
  std::vector<double> entries;
  std::vector<std::size_t> row_globals;
  double subdiag_norm = 0.0;  ///< norm of the orthogonalized candidate

  std::size_t last_row() const { return first_row + entries.size() - 1; }
  std::size_t super_count() const { return index - first_row; }
  std::size_t sub_count() const { return last_row() - index; }
};

/// p x p cache of the subdiagonal entries of the p most recent Hessenberg
/// columns, used as a column FIFO. Column l (newest last) holds
/// h_{g+1,g}, ..., h_{g+p,g} for the column g pushed p-1-l pushes ago, so the
/// superdiagonal part of the next column sits on the antidiagonal.
class SubdiagonalCache {
 public:
  explicit SubdiagonalCache(std::size_t p) : p_(p), c_(p, p) {}

  void push(std::span<const double> subdiagonal);

  /// h_{j,j-p+l} for l = 0..p-1 where j is the column about to be formed.
  double antidiagonal(std::size_t l) const { return c_(p_ - 1 - l, l); }

  const BlockVector& matrix() const { return c_; }

 private:
  std::size_t p_;
  BlockVector c_;
};

struct LanczosConfig {
  double gamma = 0.0;  ///< absolute dependence tolerance on h_{j+p,j}
  BreakdownPolicy policy = BreakdownPolicy::RandomReplacement;
  std::uint64_t seed = 0;
  std::size_t pool_size = 1;
  bool reorthogonalize = true;
  /// h_{j+p,j} at or below exact_factor * eps * norm_estimate counts as exact
  /// dependence (rounding noise); between that and gamma as near dependence.
  double norm_estimate = 1.0;
  double exact_factor = 64.0;
};

struct StepResult {
  HessenbergColumn column;
  std::optional<BreakdownEvent> breakdown;
};

/// Banded Lanczos process over a fixed window of the 2p most recent basis
/// vectors. The operator is applied to p vectors at once every p steps; the
/// individual steps consume the cached products.
class LanczosProcess {
 public:
  struct BasisVector {
    std::size_t global;
    std::size_t compact;
    Vector data;
  };
  struct RetainedVector {
    std::size_t global;
    std::size_t expiry_iteration;
    Vector data;
  };

  /// Orthonormalizes F0 (thin QR) and seeds the window with U_p.
  LanczosProcess(const SymmetricOperator& a, const BlockVector& f0, LanczosConfig config);

  std::size_t n() const { return n_; }
  std::size_t block_size() const { return p_; }
  std::size_t effective_block_size() const;
  std::size_t iterations() const { return steps_done_; }
  std::size_t block_applies() const { return block_applies_; }
  const BlockVector& s_factor() const { return s_; }
  const LanczosConfig& config() const { return config_; }

  /// True once every index chain has been retired (shrink policy only).
  bool exhausted() const { return !next_column_.has_value(); }
  std::optional<std::size_t> next_column() const { return next_column_; }

  /// W = A [u_j ... u_{j+p-1}] for the active indices of the next block.
  /// step() calls this on its own when the cache runs dry.
  void prefetch_block();
  std::size_t cached_columns() const { return cached_.size(); }

  /// One banded Lanczos step for the next active column. On breakdown the
  /// candidate row is reported with value exactly 0 and one of the handlers
  /// below must run before the next step (resolve_breakdown picks by policy).
  StepResult step();

  /// Applies the configured policy; near-dependent candidates are retained first.
  void resolve_breakdown(StepResult& result);

  /// Installs a random unit vector orthogonal to the window and the retained
  /// vectors as u_{j+p}. Throws ReplacementExhausted if nothing is left.
  std::span<const double> replace_dependent(BreakdownEvent& event);

  /// Drops the candidate, retires its index chain j+p, j+2p, ... and removes
  /// the candidate row from the column.
  void shrink_dependent(BreakdownEvent& event, HessenbergColumn& column);

  /// Keeps the rejected (normalized) candidate for orthogonalization until the
  /// iteration count reaches event.iteration + 2p.
  void retain_near_dependent(const BreakdownEvent& event);

  bool is_retired(std::size_t global) const { return retired_from_[global % p_] <= global; }

  /// Basis vector by global index, if still in the window.
  const BasisVector* find(std::size_t global) const;
  const BasisVector& newest() const { return window_.back(); }
  const std::deque<BasisVector>& window() const { return window_; }
  const std::vector<RetainedVector>& retained() const { return retained_; }
  const SubdiagonalCache& subdiagonal_cache() const { return cache_; }

  /// Largest |G - I| entry over the Gram matrix of window and retained vectors.
  double orthonormality_error() const;

 private:
  void install(std::size_t global, Vector v);
  void orthogonalize_pool_against(std::span<const double> v);
  Vector draw_random();
  void refill_pool();
  void advance(std::size_t j);

  const SymmetricOperator* a_;
  LanczosConfig config_;
  std::size_t n_;
  std::size_t p_;
  BlockVector s_;
  std::mt19937_64 rng_;

  std::deque<BasisVector> window_;
  std::vector<RetainedVector> retained_;
  std::deque<Vector> pool_;
  SubdiagonalCache cache_;
  std::vector<std::size_t> retired_from_;

  BlockVector w_block_;
  std::deque<std::pair<std::size_t, std::size_t>> cached_;  // (global index, column of w_block_)

  std::optional<std::size_t> next_column_;
  std::size_t last_column_ = 0;
  std::size_t next_compact_ = 0;
  std::size_t steps_done_ = 0;
  std::size_t block_applies_ = 0;

  bool pending_ = false;
  Vector pending_candidate_;
};

}  // namespace bminres
