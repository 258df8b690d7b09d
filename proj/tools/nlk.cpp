// nlk: run one solve or a benchmark grid and write plot-ready tables.

#include "nlk/bench.hpp"
#include "nlk/types.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

constexpr int exit_failure = 1;

struct SolveArgs
{
    std::string problem;
    std::size_t m = 0;
    std::string method;
    std::optional<double> theta;
    std::string beta_max = "inf";
    double epsilon = 1e-16;
    std::optional<double> alpha;
    std::optional<double> beta;
    double tau_a = 1e-6;
    double tau_r = 1e-8;
    std::size_t max_iters = 100000;
    std::uint64_t seed = 0;
    std::string history;
    bool reference = false;
    double c = 0.9;
    double coupling = 4.0;
    bool allow_large = false;
};

struct BenchArgs
{
    std::string config;
    std::string out;
    std::string format = "csv";
};

bool completed(const nlk::RunRecord& r)
{
    return r.status != nlk::SolveStatus::EvaluationFailure;
}

void report_failures(const std::vector<nlk::RunRecord>& records)
{
    for (const nlk::RunRecord& r : records)
        if (!completed(r))
            std::cerr << "nlk: " << nlk::history_stem(r) << ": " << r.failure << '\n';
}

int run_solve(const SolveArgs& a)
{
    const auto kind = nlk::parse_problem_kind(a.problem);
    if (!kind)
        throw nlk::Error(nlk::ErrorCode::InvalidArgument, "unknown problem '" + a.problem + "'");
    const auto method = nlk::parse_method(a.method);
    if (!method)
        throw nlk::Error(nlk::ErrorCode::InvalidArgument, "unknown method '" + a.method + "'");

    nlk::SuiteCell cell;
    cell.problem.kind = *kind;
    cell.problem.m = a.m;
    cell.problem.c = a.c;
    cell.problem.rosenbrock_coupling = a.coupling;
    cell.problem.allow_large = a.allow_large;
    cell.method = nlk::default_config(*method);
    cell.method.theta = a.theta.value_or(nlk::default_theta(*kind));
    cell.method.epsilon = a.epsilon;
    cell.method.beta_max = a.beta_max == "inf" ? std::numeric_limits<double>::infinity() : std::stod(a.beta_max);
    if (a.alpha)
        cell.method.const_alpha = *a.alpha;
    if (a.beta)
        cell.method.const_beta = *a.beta;
    nlk::validate(cell.method);
    cell.stop = {a.tau_a, a.tau_r, a.max_iters};
    nlk::validate(cell.stop);

    nlk::SuiteOptions options;
    options.seeds = {a.seed};
    options.history = !a.history.empty();
    options.reference = a.reference;
    const std::vector<nlk::RunRecord> records = nlk::run_suite({cell}, options);

    std::cout << nlk::summary_csv(records);
    if (!a.history.empty())
        nlk::write_text_file(a.history, nlk::history_csv(records.front().history));
    report_failures(records);
    return completed(records.front()) ? 0 : exit_failure;
}

int run_bench(const BenchArgs& a)
{
    const auto format = nlk::parse_output_format(a.format);
    if (!format)
        throw nlk::Error(nlk::ErrorCode::InvalidArgument, "format must be csv or json");
    std::ifstream in(a.config);
    if (!in)
        throw nlk::Error(nlk::ErrorCode::IoFailure, "cannot read " + a.config);
    std::ostringstream text;
    text << in.rdbuf();
    const nlk::SuiteConfig config = nlk::parse_suite_config(text.str());

    std::vector<nlk::RunRecord> records = nlk::run_suite(config.cells, config.options);
    try
    {
        nlk::attach_speedups(records);
    }
    catch (const nlk::Error& e)
    {
        std::cerr << "nlk: speed-up column left empty: " << e.what() << '\n';
    }
    for (const auto& path : nlk::emit(records, *format, a.out))
        std::cout << path.string() << '\n';
    report_failures(records);
    return std::all_of(records.begin(), records.end(), completed) ? 0 : exit_failure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Block nonlinear Kaczmarz solvers and benchmark harness"};
    app.require_subcommand(1);

    SolveArgs s;
    CLI::App* solve = app.add_subcommand("solve", "Solve one benchmark problem and print a summary row");
    solve->add_option("--problem", s.problem, "modified_rosenbrock, extended_cragg_levy, chandrasekhar_h, "
                                              "augmented_rosenbrock or extended_powell")
        ->required();
    solve->add_option("--m", s.m, "Number of equations")->required();
    solve->add_option("--method", s.method, "abnkam, abnkam_ideal, abnk2, abnkm_const, nk, nurk, mrnk, ngrk, "
                                            "ngrkm, mrbnk or rbcnk")
        ->required();
    solve->add_option("--theta", s.theta, "Greedy selectivity in (0, 1]; per-problem default when omitted");
    solve->add_option("--beta-max", s.beta_max, "Momentum truncation bound or inf")->capture_default_str();
    solve->add_option("--epsilon", s.epsilon, "Guard on the momentum gap")->capture_default_str();
    solve->add_option("--alpha", s.alpha, "Constant step size (abnkm_const, row methods)");
    solve->add_option("--beta", s.beta, "Constant momentum (abnkm_const, ngrkm)");
    solve->add_option("--tau-a", s.tau_a, "Absolute tolerance")->capture_default_str();
    solve->add_option("--tau-r", s.tau_r, "Relative tolerance")->capture_default_str();
    solve->add_option("--max-iters", s.max_iters, "Iteration cap")->capture_default_str();
    solve->add_option("--seed", s.seed, "Seed for randomized methods")->capture_default_str();
    solve->add_option("--history", s.history, "Write the per-iteration history CSV here");
    solve->add_flag("--reference", s.reference, "Record errors against a tightened ABNKAm solution");
    solve->add_option("--c", s.c, "H-equation albedo")->capture_default_str();
    solve->add_option("--rosenbrock-coupling", s.coupling, "Augmented Rosenbrock coefficient")
        ->capture_default_str();
    solve->add_flag("--allow-large", s.allow_large, "Allow dense H-equation instances above 4000");

    BenchArgs b;
    CLI::App* bench = app.add_subcommand("bench", "Run a grid described by a key = value file");
    bench->add_option("--config", b.config, "Grid description")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", b.out, "Output directory")->required();
    bench->add_option("--format", b.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (solve->parsed())
            return run_solve(s);
        return run_bench(b);
    }
    catch (const std::exception& e)
    {
        std::cerr << "nlk: " << e.what() << '\n';
        return exit_failure;
    }
}
