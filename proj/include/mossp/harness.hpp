#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mossp/baselines.hpp"
#include "mossp/problems.hpp"
#include "mossp/solver.hpp"

namespace mossp {

// ---- LIBSVM input ---------------------------------------------------------

/// Parses `label idx:val ...` lines. Blank lines and `#` comments are skipped.
/// Labels other than ±1 are remapped when exactly two distinct values occur
/// (smaller → −1); the mapping is recorded in Dataset::label_note.
/// `n_override` fixes the column count; an index beyond it is a parse error.
Dataset libsvm_parse(std::istream& in, std::optional<std::size_t> n_override = std::nullopt);
Dataset read_libsvm(const std::string& path, std::optional<std::size_t> n_override = std::nullopt);

/// `path` or `synthetic:N=2000,n=68,seed=7`. Rows are scaled to unit norm when
/// `normalize` is set.
Dataset load_dataset(const std::string& spec, bool normalize);

// ---- metrics --------------------------------------------------------------

inline constexpr const char* kMetricsHeader =
    "iter,oracle_calls,elapsed_s,objective,feas,infeas_stat,crit_u,crit_gap,potential";

void write_metrics(const std::vector<IterationRecord>& records, std::ostream& out);
void write_metrics(const std::vector<IterationRecord>& records, const std::string& path);
std::vector<IterationRecord> read_metrics(std::istream& in);
std::vector<IterationRecord> read_metrics(const std::string& path);

/// Seventeen significant digits; parses back to the same double.
std::string format_double(double v);

// ---- quadratic-equality instances ---------------------------------------

/// First line `n M`, then M lines `q... | a... | b`. Seeded instances end with
/// a `# generated by gen-quadeq n=.. M=.. seed=..` line.
void write_quadeq(const QuadEqInstance& inst, std::ostream& out);
void write_quadeq(const QuadEqInstance& inst, const std::string& path);
/// When the provenance line is present and regenerating from its seed
/// reproduces the stored data, x_star is restored; otherwise it is left empty.
QuadEqInstance read_quadeq(std::istream& in);
QuadEqInstance read_quadeq(const std::string& path);

// ---- run specification ---------------------------------------------------

enum class Algorithm { mossp_p, mossp_r, spdc_p, spdc_r, salm_p, salm_r };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
bool is_mossp(Algorithm a);
bool uses_recursive_momentum(Algorithm a);

/// Everything needed to reproduce a solve or benchmark. Baselines reuse
/// K (outer iterations), rho0 (penalty ρ) and alpha0 (momentum α).
struct RunSpec {
  Algorithm algo = Algorithm::mossp_p;
  std::string dataset;
  std::string problem = "logistic";  ///< logistic | quadeq
  std::string quadeq;                ///< instance file; empty generates one from quadeq_seed
  std::uint64_t quadeq_seed = 0;
  double lambda = 0.01;
  std::vector<double> lambda_grid;  ///< benchmark sweeps these when non-empty
  std::size_t K = 25000;
  std::optional<std::size_t> batch;  ///< empty: 32, or 16 when N < 1000
  std::size_t b0 = 1;
  double b0_scale = 1.0;
  Preset preset = Preset::thm31;
  double rho0 = 1.0;
  double mu0 = 0.25;
  std::optional<double> alpha0;
  std::optional<double> gamma;
  double beta = 1.0;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::optional<std::size_t> diag_stride;  ///< empty: 50 for MoSSP, 1 for baselines
  bool normalize_rows = true;
  bool feasible_init = true;
  bool record_time = false;
  std::string out;
  std::string time_budget_from;
  std::size_t inner_iters = 5;
  double prox_weight = 0.2;
  double inner_step = 0.01;
  std::optional<double> dual_step;
};

/// Sets one field from its `key = value` form. Hyphens in keys are accepted.
void set_field(RunSpec& spec, const std::string& key, const std::string& value);

/// `key = value` lines with `#` comments, applied on top of the defaults.
RunSpec parse_config(std::istream& in);
RunSpec read_config(const std::string& path);

/// Every field in `key = value` form; parse_config(serialize(s)) == s.
std::string serialize(const RunSpec& spec);

bool operator==(const RunSpec& a, const RunSpec& b);

/// Rejects incompatible combinations (preset vs momentum, baseline-only
/// fields on MoSSP runs, missing inputs) before anything is executed.
void check_compatibility(const RunSpec& spec);

SolverConfig solver_config(const RunSpec& spec, std::size_t N);
BaselineConfig baseline_config(const RunSpec& spec, std::size_t N);
std::size_t effective_batch(const RunSpec& spec, std::size_t N);

/// Constants of the row-normalized sphere-constrained logistic problem
/// (‖Xᵢ‖ = 1, λ√n ≤ 4), used by validate-config when no dataset is given.
PenaltyConstants default_constants(double rho0);

struct LoadedProblem {
  Dataset data;
  std::optional<QuadEqInstance> quadeq;
  ProblemInstance problem;
};

LoadedProblem load_problem(const RunSpec& spec);

// ---- execution -------------------------------------------------------------

/// Result of validate-config. For MoSSP algorithms `schedule` holds every
/// inequality; for baselines `error` carries any configuration error.
struct ValidationReport {
  std::optional<ScheduleReport> schedule;
  std::string error;
  bool ok() const;
};

ValidationReport validate_config(const RunSpec& spec);

/// Reads the last elapsed_s of a metrics file written with record_time.
double time_budget_from_metrics(const std::string& path);

/// One run with `seed`; time_budget_s > 0 switches baselines to budget mode.
RunResult execute(const RunSpec& spec, const ProblemInstance& problem, std::uint64_t seed,
                  double time_budget_s = 0.0);

/// Runs spec.seed and writes metrics to spec.out when set.
RunResult solve(const RunSpec& spec);

struct SummaryRow {
  std::uint64_t seed = 0;
  double objective = 0.0;
  double feas = 0.0;
  double violation_l1 = 0.0;
};

struct SummaryStats {
  double mean_objective = 0.0, std_objective = 0.0;
  double mean_feas = 0.0, std_feas = 0.0;
  double mean_violation = 0.0, std_violation = 0.0;
};

/// Sample mean and (n − 1) standard deviation; std is 0 for a single row.
SummaryStats summarize(const std::vector<SummaryRow>& rows);

/// `seed,objective,feas,violation_l1` rows followed by `mean` and `std` rows.
void write_summary(const std::vector<SummaryRow>& rows, const std::string& path);
std::vector<SummaryRow> read_summary_rows(const std::string& path);

struct BenchmarkOutput {
  double lambda = 0.0;
  std::vector<std::string> metric_files;
  std::string summary_file;
  std::vector<SummaryRow> rows;
  SummaryStats stats;
};

/// Runs seeds spec.seed … spec.seed + repeats − 1 concurrently (bounded by
/// `threads`, 0 = hardware concurrency). Writes `seed_<s>.csv` and
/// `summary.csv` into spec.out, or one `lambda_<v>/` subdirectory per grid value.
std::vector<BenchmarkOutput> benchmark(const RunSpec& spec, unsigned threads = 0);

}  // namespace mossp
