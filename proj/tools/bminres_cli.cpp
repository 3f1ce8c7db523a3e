// Command-line front end: general solves and the shifted-Laplacian experiments.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bminres/errors.hpp"
#include "bminres/experiments.hpp"
#include "bminres/matrix_market.hpp"

using namespace bminres;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct CommonFlags {
  double tol = 1e-8;
  std::size_t maxit = 1000;
  double gamma = 1e-8;
  std::string policy = "replace";
  std::uint64_t seed = 0;
  std::string precond = "none";
  std::string out;
  bool with_timing = false;
  std::size_t pool = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--tol", f.tol, "Relative residual target per column")->capture_default_str();
  cmd->add_option("--maxit", f.maxit, "Iteration cap")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Dependence tolerance relative to the estimated operator norm")
      ->capture_default_str();
  cmd->add_option("--policy", f.policy, "Breakdown policy")
      ->check(CLI::IsMember({"replace", "shrink"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "PRNG seed")->capture_default_str();
  cmd->add_option("--precond", f.precond, "Preconditioner")
      ->check(CLI::IsMember({"ic0", "none"}))
      ->capture_default_str();
  cmd->add_option("--replacement-pool", f.pool, "Random replacement vectors kept ready")->capture_default_str();
  cmd->add_option("--out", f.out, "CSV output path (stdout when omitted)");
  cmd->add_flag("--with-timing", f.with_timing, "Add wall-clock columns and meta lines");
}

SolverConfig to_config(const CommonFlags& f) {
  SolverConfig c;
  c.tol = f.tol;
  c.max_iter = f.maxit;
  c.gamma = f.gamma;
  c.policy = f.policy == "shrink" ? BreakdownPolicy::BlockShrink : BreakdownPolicy::RandomReplacement;
  c.seed = f.seed;
  c.replacement_pool = f.pool;
  return c;
}

MetaList config_meta(const std::string& command, const CommonFlags& f) {
  return {{"command", command},
          {"tol", format_double(f.tol)},
          {"maxit", std::to_string(f.maxit)},
          {"gamma", format_double(f.gamma)},
          {"policy", f.policy},
          {"seed", std::to_string(f.seed)},
          {"precond", f.precond},
          {"replacement_pool", std::to_string(f.pool)}};
}

/// Runs `write` against the --out file, or stdout.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write(out);
  if (!out) throw Error("write to " + path + " failed");
}

/// Appends the columns described by one --rhs spec.
void append_rhs(std::vector<Vector>& cols, const std::string& spec, std::size_t n, std::uint64_t seed) {
  auto parse_count = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty()) throw CLI::ValidationError("--rhs", "bad number in '" + spec + "'");
    return static_cast<std::size_t>(v);
  };
  if (spec == "ones") {
    cols.emplace_back(n, 1.0);
  } else if (spec.rfind("random:", 0) == 0) {
    const std::size_t k = parse_count(spec.substr(7));
    if (k == 0) throw CLI::ValidationError("--rhs", "random:k needs k >= 1");
    const BlockVector b = random_rhs(n, k, seed);
    for (std::size_t c = 0; c < k; ++c) cols.emplace_back(b.col(c).begin(), b.col(c).end());
  } else if (spec.rfind("e:", 0) == 0) {
    const std::size_t i = parse_count(spec.substr(2));
    if (i < 1 || i > n) throw CLI::ValidationError("--rhs", "e:i needs 1 <= i <= n");
    Vector e(n, 0.0);
    e[i - 1] = 1.0;
    cols.push_back(std::move(e));
  } else {
    const BlockVector b = mm_read_dense(spec);
    if (b.rows() != n) throw DimensionMismatch("right-hand side file has " + std::to_string(b.rows()) + " rows, expected " + std::to_string(n));
    for (std::size_t c = 0; c < b.cols(); ++c) cols.emplace_back(b.col(c).begin(), b.col(c).end());
  }
}

int status_exit(SolveStatus s) { return s == SolveStatus::Converged ? kExitConverged : kExitNotConverged; }

void report(const std::string& label, const SolveResult& r) {
  std::cerr << label << ": " << to_string(r.status) << " after " << r.history.iterations << " iterations, "
            << r.history.breakdowns.size() << " breakdown event(s)\n";
}

struct SolveFlags {
  CommonFlags common;
  std::string matrix;
  std::vector<double> laplacian;
  std::vector<std::string> rhs;
  bool rhs_apply_a = false;
  std::size_t true_every = 0;
  std::string solution;
};

int run_solve(const SolveFlags& f) {
  if (f.matrix.empty() == f.laplacian.empty()) {
    throw CLI::ValidationError("exactly one of --matrix or --laplacian is required");
  }
  if (f.rhs.empty()) throw CLI::ValidationError("at least one --rhs is required");
  const bool ic0 = f.common.precond == "ic0";

  std::optional<PreparedSystem> system;
  MetaList meta = config_meta("solve", f.common);
  if (!f.matrix.empty()) {
    CsrSymmetricMatrix a = mm_read(f.matrix);
    std::optional<CsrSymmetricMatrix> m;
    if (ic0) m = a;
    system.emplace(std::move(a), std::move(m));
    meta.emplace_back("matrix", f.matrix);
  } else {
    if (f.laplacian[0] < 2 || f.laplacian[0] != static_cast<double>(static_cast<std::size_t>(f.laplacian[0]))) {
      throw CLI::ValidationError("--laplacian", "grid must be an integer >= 2");
    }
    const Laplacian2dSpec spec{static_cast<std::size_t>(f.laplacian[0]), f.laplacian[1]};
    system.emplace(PreparedSystem::shifted_laplacian(spec, ic0));
    meta.emplace_back("laplacian_grid", std::to_string(spec.grid));
    meta.emplace_back("laplacian_sigma", format_double(spec.sigma));
  }

  const std::size_t n = system->n();
  std::vector<Vector> cols;
  for (const auto& s : f.rhs) append_rhs(cols, s, n, f.common.seed);
  if (f.rhs_apply_a) {
    // A M^-1 b_1: equals A b_1 unpreconditioned and stays dependent on b_1 after the split transform.
    const Vector w = system->apply_preconditioner_inverse(cols.front());
    cols.push_back(system->original().apply(w));
  }
  for (const auto& s : f.rhs) meta.emplace_back("rhs", s);
  if (f.rhs_apply_a) meta.emplace_back("rhs", "A*M^-1*rhs1");

  SolverConfig config = to_config(f.common);
  config.true_residual_check_every = f.true_every;
  const SolveResult r = system->solve(BlockVector::from_columns(cols), config);
  for (auto& kv : run_meta("", r, f.common.with_timing)) meta.push_back(std::move(kv));

  emit(f.common.out, [&](std::ostream& out) { write_history_csv(out, meta, {{"solve", &r}}); });
  if (!f.solution.empty()) mm_write_dense(f.solution, r.x);
  report("solve", r);
  return status_exit(r.status);
}

struct FigFlags {
  CommonFlags common;
  std::size_t grid = 200;
  double sigma = 200.0;
};

ExperimentOptions to_options(const FigFlags& f) {
  ExperimentOptions o;
  o.problem = {f.grid, f.sigma};
  o.problem.validate();
  o.solver = to_config(f.common);
  o.precondition = f.common.precond == "ic0";
  return o;
}

MetaList fig_meta(const std::string& command, const FigFlags& f) {
  MetaList meta = config_meta(command, f.common);
  meta.emplace_back("grid", std::to_string(f.grid));
  meta.emplace_back("sigma", format_double(f.sigma));
  return meta;
}

void add_fig_common(CLI::App* cmd, FigFlags& f) {
  f.common.precond = "ic0";
  f.common.maxit = 20000;
  add_common(cmd, f.common);
  cmd->add_option("--grid", f.grid, "Grid side length g (n = g^2)")->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "Shift in A = -L - sigma I")->capture_default_str();
}

int finish_comparison(const ComparisonRun& run, const FigFlags& f, MetaList meta) {
  emit(f.common.out, [&](std::ostream& out) { write_comparison_csv(out, meta, run, f.common.with_timing); });
  report(run.experiment + " block", run.block);
  std::cerr << run.experiment << " sequential: " << run.sequential_total() << " iterations in total\n";
  return kExitConverged;
}

std::vector<std::size_t> default_ms(EigmixMode mode) {
  std::vector<std::size_t> ms;
  const std::size_t step = mode == EigmixMode::SmallSmall ? 10 : 25;
  const std::size_t cap = mode == EigmixMode::SmallSmall ? 100 : 200;
  for (std::size_t m = 0; m <= cap; m += step) ms.push_back(m);
  return ms;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block MINRES solver for symmetric indefinite systems with multiple right-hand sides"};
  app.require_subcommand(1);

  SolveFlags sf;
  auto* solve_cmd = app.add_subcommand("solve", "Solve A X = B and write the residual history as CSV");
  add_common(solve_cmd, sf.common);
  auto* mat = solve_cmd->add_option("--matrix", sf.matrix, "Matrix Market coordinate file");
  auto* lap = solve_cmd->add_option("--laplacian", sf.laplacian, "Shifted Laplacian: grid side g and shift sigma")
                  ->expected(2);
  mat->excludes(lap);
  solve_cmd->add_option("--rhs", sf.rhs, "ones | random:k | e:i | dense Matrix Market file (repeatable)");
  solve_cmd->add_flag("--rhs-apply-A", sf.rhs_apply_a, "Append A M^-1 b_1 as an extra column");
  solve_cmd->add_option("--true-residual-every", sf.true_every, "Audit the true residual every k iterations");
  solve_cmd->add_option("--solution", sf.solution, "Write X as a dense Matrix Market file");

  FigFlags f1, f2, f3, f4, f5, f6;
  std::size_t fig1_k = 10;
  std::size_t fig2_pmax = 10;
  std::string fig4_side = "left";
  struct EigmixFlags {
    std::vector<std::size_t> ms;
    std::size_t trials = 5;
    std::size_t threads = 0;
    bool full_scale = false;
  } e5, e6;

  auto* c1 = app.add_subcommand("fig1", "Random right-hand sides: block vs sequential histories");
  add_fig_common(c1, f1);
  c1->add_option("--k", fig1_k, "Number of right-hand sides")->capture_default_str();

  auto* c2 = app.add_subcommand("fig2", "Iteration ratio block/sequential for p = 1..pmax");
  add_fig_common(c2, f2);
  c2->add_option("--pmax", fig2_pmax, "Largest block size")->capture_default_str();

  auto* c3 = app.add_subcommand("fig3", "Dependent pair (e_1, A M^-1 e_1)");
  add_fig_common(c3, f3);

  auto* c4 = app.add_subcommand("fig4", "Pairs (e_1, ones) [left] and (e_1, e_2) [right]");
  add_fig_common(c4, f4);
  c4->add_option("--side", fig4_side, "Which pair")->check(CLI::IsMember({"left", "right"}))->capture_default_str();

  auto add_eigmix = [&](const char* name, const char* desc, FigFlags& f, EigmixFlags& e) {
    auto* c = app.add_subcommand(name, desc);
    add_fig_common(c, f);
    f.grid = 50;
    c->get_option("--grid")->default_val(50);
    c->add_option("--m", e.ms, "Overlap values (repeatable; default sweep)");
    c->add_option("--trials", e.trials, "Pairs per m")->capture_default_str();
    c->add_option("--threads", e.threads, "Parallel trials (default BLOCK_MINRES_THREADS or all cores)");
    c->add_flag("--full-scale", e.full_scale, "Grid 200 with 100 trials per m");
    return c;
  };
  auto* c5 = add_eigmix("fig5", "Eigenvector-mix pairs from the 200 smallest modes", f5, e5);
  auto* c6 = add_eigmix("fig6", "Eigenvector-mix pairs from the smallest and largest modes", f6, e6);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(sf);
    if (c1->parsed()) {
      const auto run = fig1(to_options(f1), fig1_k);
      auto meta = fig_meta("fig1", f1);
      meta.emplace_back("k", std::to_string(fig1_k));
      return finish_comparison(run, f1, meta);
    }
    if (c2->parsed()) {
      const auto rows = fig2(to_options(f2), fig2_pmax);
      auto meta = fig_meta("fig2", f2);
      emit(f2.common.out, [&](std::ostream& out) { write_ratio_csv(out, meta, rows); });
      return kExitConverged;
    }
    if (c3->parsed()) return finish_comparison(fig3(to_options(f3)), f3, fig_meta("fig3", f3));
    if (c4->parsed()) {
      auto meta = fig_meta("fig4", f4);
      meta.emplace_back("side", fig4_side);
      return finish_comparison(fig4(to_options(f4), fig4_side == "right"), f4, meta);
    }
    for (auto [cmd, f, e, mode, name] :
         {std::tuple{c5, &f5, &e5, EigmixMode::SmallSmall, "fig5"}, std::tuple{c6, &f6, &e6, EigmixMode::SmallLarge, "fig6"}}) {
      if (!cmd->parsed()) continue;
      if (e->full_scale) {
        f->grid = 200;
        e->trials = 100;
      }
      const auto ms = e->ms.empty() ? default_ms(mode) : e->ms;
      const std::size_t threads = e->threads > 0 ? e->threads : thread_cap_from_env();
      const auto rows = eigmix_experiment(to_options(*f), mode, ms, e->trials, f->common.seed, threads);
      auto meta = fig_meta(name, *f);
      meta.emplace_back("mode", to_string(mode));
      meta.emplace_back("trials", std::to_string(e->trials));
      emit(f->common.out, [&](std::ostream& out) { write_eigmix_csv(out, meta, rows, f->common.with_timing); });
      return kExitConverged;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
