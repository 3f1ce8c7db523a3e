#include "bminres/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ostream>
#include <random>
#include <thread>

#include "bminres/errors.hpp"
#include "bminres/matrix_market.hpp"

namespace bminres {

PreparedSystem::PreparedSystem(CsrSymmetricMatrix a, std::optional<CsrSymmetricMatrix> precond_source)
    : a_(std::make_unique<CsrSymmetricMatrix>(std::move(a))), op_(std::make_unique<CsrOperator>(*a_)) {
  if (precond_source) {
    if (precond_source->n() != a_->n()) throw DimensionMismatch("PreparedSystem: preconditioner size differs");
    factor_ = std::make_unique<Ic0Factor>(ic0_factorize(*precond_source));
    split_ = std::make_unique<SplitPreconditionedOperator>(*op_, *factor_);
  }
}

PreparedSystem PreparedSystem::shifted_laplacian(const Laplacian2dSpec& spec, bool precondition) {
  std::optional<CsrSymmetricMatrix> m;
  if (precondition) m = build_laplacian_2d(spec).scaled(-1.0);
  return PreparedSystem(build_shifted_laplacian_2d(spec), std::move(m));
}

const SymmetricOperator& PreparedSystem::solver_operator() const {
  if (split_) return *split_;
  return *op_;
}

BlockVector PreparedSystem::transform_rhs(const BlockVector& b) const {
  return split_ ? split_->rhs_transform(b) : b;
}

BlockVector PreparedSystem::recover_solution(const BlockVector& y) const {
  return split_ ? split_->solution_recover(y) : y;
}

Vector PreparedSystem::apply_preconditioner_inverse(std::span<const double> v) const {
  if (!factor_) return Vector(v.begin(), v.end());
  Vector y = tri_solve(*factor_, v, false);
  tri_solve_inplace(*factor_, y, true);
  return y;
}

SolveResult PreparedSystem::solve(const BlockVector& b, const SolverConfig& config) const {
  SolveResult r = bminres::solve(solver_operator(), transform_rhs(b), nullptr, config);
  r.x = recover_solution(r.x);
  return r;
}

std::size_t ComparisonRun::sequential_total() const {
  std::size_t total = 0;
  for (const auto& r : sequential) total += r.history.iterations;
  return total;
}

double ComparisonRun::sequential_seconds() const {
  double total = 0.0;
  for (const auto& r : sequential) total += r.history.wall_seconds;
  return total;
}

ComparisonRun run_comparison(const std::string& experiment, const PreparedSystem& system, const BlockVector& b,
                             const SolverConfig& config) {
  ComparisonRun run;
  run.experiment = experiment;
  run.block = system.solve(b, config);
  for (std::size_t c = 0; c < b.cols(); ++c) {
    BlockVector bc(b.rows(), 1);
    bc.set_col(0, b.col(c));
    run.sequential.push_back(system.solve(bc, config));
  }
  return run;
}

BlockVector random_rhs(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  BlockVector b(n, k);
  for (double& v : b.data()) v = unif(rng);
  return b;
}

BlockVector ones_identity_rhs(std::size_t n, std::size_t p) {
  if (p == 0 || p > n) throw DimensionMismatch("ones_identity_rhs: need 1 <= p <= n");
  BlockVector b(n, p);
  for (std::size_t i = 0; i < n; ++i) b(i, 0) = 1.0;
  for (std::size_t c = 1; c < p; ++c) b(c - 1, c) = 1.0;
  return b;
}

BlockVector dependent_pair_rhs(const PreparedSystem& system) {
  const std::size_t n = system.n();
  BlockVector b(n, 2);
  b(0, 0) = 1.0;
  const Vector w = system.apply_preconditioner_inverse(b.col(0));
  b.set_col(1, system.original().apply(w));
  return b;
}

ComparisonRun fig1(const ExperimentOptions& opt, std::size_t k) {
  const auto system = PreparedSystem::shifted_laplacian(opt.problem, opt.precondition);
  return run_comparison("fig1", system, random_rhs(system.n(), k, opt.solver.seed), opt.solver);
}

ComparisonRun fig3(const ExperimentOptions& opt) {
  const auto system = PreparedSystem::shifted_laplacian(opt.problem, opt.precondition);
  return run_comparison("fig3", system, dependent_pair_rhs(system), opt.solver);
}

ComparisonRun fig4(const ExperimentOptions& opt, bool right) {
  const auto system = PreparedSystem::shifted_laplacian(opt.problem, opt.precondition);
  const std::size_t n = system.n();
  BlockVector b(n, 2);
  b(0, 0) = 1.0;
  if (right) {
    b(1, 1) = 1.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) b(i, 1) = 1.0;
  }
  return run_comparison(right ? "fig4-right" : "fig4-left", system, b, opt.solver);
}

std::vector<RatioRow> fig2(const ExperimentOptions& opt, std::size_t p_max) {
  const auto system = PreparedSystem::shifted_laplacian(opt.problem, opt.precondition);
  const std::size_t n = system.n();
  const BlockVector all = ones_identity_rhs(n, p_max);
  // Column c of every block is the same vector, so each sequential run is done once.
  std::vector<std::size_t> single(p_max);
  for (std::size_t c = 0; c < p_max; ++c) {
    BlockVector bc(n, 1);
    bc.set_col(0, all.col(c));
    single[c] = system.solve(bc, opt.solver).history.iterations;
  }
  std::vector<RatioRow> rows;
  std::size_t seq = 0;
  for (std::size_t p = 1; p <= p_max; ++p) {
    seq += single[p - 1];
    const std::size_t block = system.solve(ones_identity_rhs(n, p), opt.solver).history.iterations;
    rows.push_back({p, block, seq, static_cast<double>(block) / static_cast<double>(seq)});
  }
  return rows;
}

std::size_t thread_cap_from_env() {
  if (const char* env = std::getenv("BLOCK_MINRES_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<EigmixRow> eigmix_experiment(const ExperimentOptions& opt, EigmixMode mode,
                                         const std::vector<std::size_t>& ms, std::size_t trials,
                                         std::uint64_t seed, std::size_t threads) {
  for (std::size_t m : ms) EigmixSpec{m, mode, trials, seed}.validate();
  const auto system = PreparedSystem::shifted_laplacian(opt.problem, opt.precondition);
  const auto basis = EigmixBasis::build(opt.problem);

  struct TrialResult {
    std::size_t block = 0;
    std::size_t sequential = 0;
    double block_seconds = 0.0;
    double sequential_seconds = 0.0;
  };
  std::vector<EigmixRow> rows;
  for (std::size_t m : ms) {
    const EigmixSpec spec{m, mode, trials, seed};
    std::vector<TrialResult> results(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t t = next++; t < trials; t = next++) {
        auto [b1, b2] = build_eigmix_rhs(spec, basis, t);
        const BlockVector b = BlockVector::from_columns({std::move(b1), std::move(b2)});
        const ComparisonRun run = run_comparison("eigmix", system, b, opt.solver);
        results[t] = {run.block.history.iterations, run.sequential_total(), run.block.history.wall_seconds,
                      run.sequential_seconds()};
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(trials, 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    EigmixRow row{m, trials, 0.0, 0.0, 0.0, 0.0};
    for (const auto& r : results) {
      row.avg_block_iterations += static_cast<double>(r.block);
      row.avg_sequential_iterations += static_cast<double>(r.sequential);
      row.avg_block_seconds += r.block_seconds;
      row.avg_sequential_seconds += r.sequential_seconds;
    }
    const double denom = static_cast<double>(std::max<std::size_t>(trials, 1));
    row.avg_block_iterations /= denom;
    row.avg_sequential_iterations /= denom;
    row.avg_block_seconds /= denom;
    row.avg_sequential_seconds /= denom;
    rows.push_back(row);
  }
  return rows;
}

namespace {

void write_preamble(std::ostream& out, const MetaList& meta) {
  out << "# bminres-csv v1\n";
  for (const auto& [k, v] : meta) out << "# meta: " << k << '=' << v << '\n';
}

}  // namespace

MetaList run_meta(const std::string& prefix, const SolveResult& r, bool with_timing) {
  MetaList meta;
  meta.emplace_back(prefix + "iterations", std::to_string(r.history.iterations));
  meta.emplace_back(prefix + "status", to_string(r.status));
  meta.emplace_back(prefix + "block_applies", std::to_string(r.history.block_applies));
  for (std::size_t c = 0; c < r.history.columns; ++c) {
    const auto& at = r.history.converged_at[c];
    meta.emplace_back(prefix + "converged_at[" + std::to_string(c + 1) + "]", at ? std::to_string(*at) : "none");
  }
  for (const auto& e : r.history.breakdowns) {
    meta.emplace_back(prefix + "breakdown", "iteration=" + std::to_string(e.iteration) +
                                                 ";column=" + std::to_string(e.column + 1) +
                                                 ";kind=" + to_string(e.kind) + ";h=" + format_double(e.h_value) +
                                                 ";policy=" + to_string(e.policy_applied));
  }
  if (with_timing) meta.emplace_back(prefix + "wall_seconds", format_double(r.history.wall_seconds));
  return meta;
}

void write_history_csv(std::ostream& out, const MetaList& meta,
                       const std::vector<std::pair<std::string, const SolveResult*>>& runs) {
  bool with_true = !runs.empty();
  for (const auto& [name, r] : runs) {
    with_true = with_true && r->history.true_residuals.size() == r->history.iterations + 1;
  }
  write_preamble(out, meta);
  out << "experiment,iteration,column,computed_rel_resid" << (with_true ? ",true_rel_resid" : "") << '\n';
  for (const auto& [name, r] : runs) {
    const auto& h = r->history;
    for (std::size_t j = 1; j <= h.iterations; ++j) {
      for (std::size_t c = 0; c < h.columns; ++c) {
        out << name << ',' << j << ',' << c + 1 << ',' << format_double(h.computed[j][c]);
        if (with_true) out << ',' << format_double(h.true_residuals[j].relative[c]);
        out << '\n';
      }
    }
  }
}

void write_comparison_csv(std::ostream& out, const MetaList& meta, const ComparisonRun& run, bool with_timing) {
  MetaList all = meta;
  for (auto& kv : run_meta("block.", run.block, with_timing)) all.push_back(std::move(kv));
  all.emplace_back("sequential.iterations", std::to_string(run.sequential_total()));
  if (with_timing) all.emplace_back("sequential.wall_seconds", format_double(run.sequential_seconds()));
  std::vector<std::pair<std::string, const SolveResult*>> runs;
  runs.emplace_back(run.experiment + ":block", &run.block);
  for (std::size_t c = 0; c < run.sequential.size(); ++c) {
    runs.emplace_back(run.experiment + ":seq" + std::to_string(c + 1), &run.sequential[c]);
  }
  write_history_csv(out, all, runs);
}

void write_ratio_csv(std::ostream& out, const MetaList& meta, const std::vector<RatioRow>& rows) {
  write_preamble(out, meta);
  out << "p,block_iterations,sequential_iterations,ratio\n";
  for (const auto& r : rows) {
    out << r.p << ',' << r.block_iterations << ',' << r.sequential_iterations << ',' << format_double(r.ratio) << '\n';
  }
}

void write_eigmix_csv(std::ostream& out, const MetaList& meta, const std::vector<EigmixRow>& rows,
                      bool with_timing) {
  write_preamble(out, meta);
  out << "m,trials,avg_block_iterations,avg_sequential_iterations";
  if (with_timing) out << ",avg_block_seconds,avg_sequential_seconds";
  out << '\n';
  for (const auto& r : rows) {
    out << r.m << ',' << r.trials << ',' << format_double(r.avg_block_iterations) << ','
        << format_double(r.avg_sequential_iterations);
    if (with_timing) out << ',' << format_double(r.avg_block_seconds) << ',' << format_double(r.avg_sequential_seconds);
    out << '\n';
  }
}

}  // namespace bminres
