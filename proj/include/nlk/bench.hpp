#ifndef NLK_BENCH_HPP
#define NLK_BENCH_HPP

#include "nlk/problems.hpp"
#include "nlk/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlk
{

/// One method on one problem instance.
struct SuiteCell
{
    MethodConfig method;
    ProblemSpec problem;
    StoppingConfig stop;
};

struct SuiteOptions
{
    std::vector<std::uint64_t> seeds{0};
    bool history = false;
    /// Solve each instance once more with ABNKAm at tau * 1e-4 and record
    /// |x_k - x_ref| in the histories. Implies history.
    bool reference = false;
    /// Worker threads. 1 keeps timings free of contention.
    std::size_t threads = 1;
};

struct RunRecord
{
    Method method = Method::ABNKAm;
    ProblemKind problem = ProblemKind::ModifiedRosenbrock;
    std::size_t m = 0;
    double theta = 0.0;
    std::uint64_t seed = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::size_t iterations = 0;
    double cpu_seconds = 0.0;
    double final_residual = 0.0;
    std::optional<double> speedup;
    std::string failure;
    std::vector<HistoryRecord> history;
};

/// Runs every cell for every seed. Failures (including invalid problem
/// sizes) are stored as EvaluationFailure records; the suite never throws
/// for a single cell.
std::vector<RunRecord> run_suite(const std::vector<SuiteCell>& cells, const SuiteOptions& options);

/// CPU of a method divided by CPU of the baseline.
double speedup_ratio(double other_cpu_seconds, double baseline_cpu_seconds);

/// Attaches SU to every converged record, relative to the baseline method on
/// the same (problem, m) and preferably the same seed. Non-converged records
/// get none. Throws MissingBaseline when a group has no converged baseline.
void attach_speedups(std::vector<RunRecord>& records, Method baseline = Method::ABNKAm);

/// Stable order by (problem, m, method), ties kept in input order.
void sort_records(std::vector<RunRecord>& records);

enum class OutputFormat
{
    Csv,
    Json,
};

std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept;

/// %.17g, which round-trips every finite double.
std::string format_double(double value);

std::string summary_csv(const std::vector<RunRecord>& records);
std::string history_csv(const std::vector<HistoryRecord>& history);

/// Inverse of summary_csv. Throws ParseFailure.
std::vector<RunRecord> parse_summary_csv(std::string_view text);

/// File name used for the history of one record, without extension.
std::string history_stem(const RunRecord& record);

///
/// Writes summary.{csv,json} into `out_dir` (created if needed) and, for
/// records carrying a history, history/<stem>.{csv,json}. Records are
/// sorted first. Returns the paths written. Throws IoFailure.
///
std::vector<std::filesystem::path> emit(std::vector<RunRecord> records, OutputFormat format,
                                        const std::filesystem::path& out_dir);

/// Writes `text` to `path`, throwing IoFailure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

struct SuiteConfig
{
    std::vector<SuiteCell> cells;
    SuiteOptions options;
};

///
/// Parses a flat `key = value` grid description. Lists are comma
/// separated; `#` starts a comment. Keys:
///
///   problems, sizes, methods     required lists
///   theta                        optional; per-problem default otherwise
///   seeds                        default 0
///   tau_a, tau_r, max_iters      stopping rule
///   epsilon, beta_max            ABNKAm guard and truncation
///   history, reference           true/false
///   threads                      worker count, default 1
///   c, rosenbrock_coupling       problem parameters
///   allow_large                  true/false, dense H-equation above 4000
///
/// Throws ParseFailure.
///
SuiteConfig parse_suite_config(std::string_view text);

} // namespace nlk

#endif // NLK_BENCH_HPP
