#include "nlk/bench.hpp"

#include "nlk/types.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace nlk
{
namespace
{

constexpr std::string_view summary_header =
    "method,problem,m,theta,seed,status,iterations,cpu_seconds,final_residual,speedup";
constexpr std::string_view history_header = "k,residual_norm,error_norm,alpha,beta,delta,block_size,branch";

std::string optional_field(const std::optional<double>& value)
{
    return value ? format_double(*value) : std::string();
}

RunRecord run_cell(const SuiteCell& cell, std::uint64_t seed, const SuiteOptions& options)
{
    RunRecord record;
    record.method = cell.method.method;
    record.problem = cell.problem.kind;
    record.m = cell.problem.m;
    record.theta = cell.method.theta;
    record.seed = seed;
    try
    {
        const Problem problem = make_problem(cell.problem);
        MethodConfig config = cell.method;
        config.seed = seed;

        SolveOptions solve_options;
        solve_options.record_history = options.history || options.reference;
        if (options.reference)
        {
            MethodConfig ref_config = default_config(Method::ABNKAm);
            ref_config.theta = cell.method.theta;
            ref_config.epsilon = cell.method.epsilon;
            ref_config.beta_max = cell.method.beta_max;
            StoppingConfig ref_stop = cell.stop;
            ref_stop.tau_a *= 1e-4;
            ref_stop.tau_r *= 1e-4;
            solve_options.x_ref = solve(*problem.system, problem.x0, ref_config, ref_stop).x;
        }

        SolveReport report = solve(*problem.system, problem.x0, config, cell.stop, solve_options);
        record.status = report.status;
        record.iterations = report.iterations;
        record.cpu_seconds = report.wall_seconds;
        record.final_residual = report.final_residual_norm;
        record.failure = std::move(report.failure);
        record.history = std::move(report.history);
    }
    catch (const std::exception& e)
    {
        record.status = SolveStatus::EvaluationFailure;
        record.failure = e.what();
    }
    return record;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(const std::string& what)
{
    throw Error(ErrorCode::ParseFailure, what);
}

double parse_double(std::string_view field, std::string_view what)
{
    const std::string text(trim(field));
    if (text == "inf" || text == "+inf")
        return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size())
        parse_error("invalid number for " + std::string(what) + ": '" + text + "'");
    return value;
}

template <typename Unsigned>
Unsigned parse_unsigned(std::string_view field, std::string_view what)
{
    const std::string_view text = trim(field);
    Unsigned value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        parse_error("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
    return value;
}

bool parse_bool(std::string_view field, std::string_view what)
{
    const std::string_view text = trim(field);
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    parse_error("invalid boolean for " + std::string(what) + ": '" + std::string(text) + "'");
}

nlohmann::json optional_json(const std::optional<double>& value)
{
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

nlohmann::json summary_json(const std::vector<RunRecord>& records)
{
    nlohmann::json out = nlohmann::json::array();
    for (const RunRecord& r : records)
    {
        nlohmann::json row;
        row["method"] = to_string(r.method);
        row["problem"] = to_string(r.problem);
        row["m"] = r.m;
        row["theta"] = r.theta;
        row["seed"] = r.seed;
        row["status"] = to_string(r.status);
        row["iterations"] = r.iterations;
        row["cpu_seconds"] = r.cpu_seconds;
        row["final_residual"] = r.final_residual;
        row["speedup"] = optional_json(r.speedup);
        if (!r.failure.empty())
            row["failure"] = r.failure;
        out.push_back(std::move(row));
    }
    return out;
}

nlohmann::json history_json(const std::vector<HistoryRecord>& history)
{
    nlohmann::json out = nlohmann::json::array();
    for (const HistoryRecord& h : history)
    {
        nlohmann::json row;
        row["k"] = h.k;
        row["residual_norm"] = h.residual_norm;
        row["error_norm"] = optional_json(h.error_norm);
        row["alpha"] = optional_json(h.step ? h.step->alpha : std::nullopt);
        row["beta"] = optional_json(h.step ? h.step->beta : std::nullopt);
        row["delta"] = optional_json(h.step ? h.step->delta : std::nullopt);
        row["block_size"] = h.step ? nlohmann::json(h.step->block_size) : nlohmann::json(nullptr);
        row["branch"] = h.step ? nlohmann::json(h.step->label()) : nlohmann::json(nullptr);
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace

std::vector<RunRecord> run_suite(const std::vector<SuiteCell>& cells, const SuiteOptions& options)
{
    if (cells.empty())
        throw Error(ErrorCode::InvalidArgument, "suite grid is empty");
    const std::vector<std::uint64_t> seeds = options.seeds.empty() ? std::vector<std::uint64_t>{0} : options.seeds;

    struct Job
    {
        const SuiteCell* cell;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const SuiteCell& cell : cells)
        for (std::uint64_t seed : seeds)
            jobs.push_back({&cell, seed});

    std::vector<RunRecord> records(jobs.size());
    const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, jobs.size());
    if (workers == 1)
    {
        for (std::size_t j = 0; j < jobs.size(); ++j)
            records[j] = run_cell(*jobs[j].cell, jobs[j].seed, options);
        return records;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t j = next++; j < jobs.size(); j = next++)
                records[j] = run_cell(*jobs[j].cell, jobs[j].seed, options);
        });
    for (std::thread& t : pool)
        t.join();
    return records;
}

double speedup_ratio(double other_cpu_seconds, double baseline_cpu_seconds)
{
    if (!(baseline_cpu_seconds > 0.0) || !(other_cpu_seconds >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "speed-up needs a positive baseline time");
    return other_cpu_seconds / baseline_cpu_seconds;
}

void attach_speedups(std::vector<RunRecord>& records, Method baseline)
{
    using Group = std::pair<ProblemKind, std::size_t>;
    std::map<Group, std::map<std::uint64_t, const RunRecord*>> bases;
    for (const RunRecord& r : records)
        if (r.method == baseline && r.status == SolveStatus::Converged)
            bases[{r.problem, r.m}].emplace(r.seed, &r);

    std::vector<std::optional<double>> su(records.size());
    for (std::size_t j = 0; j < records.size(); ++j)
    {
        const RunRecord& r = records[j];
        const auto group = bases.find({r.problem, r.m});
        if (group == bases.end())
            throw Error(ErrorCode::MissingBaseline, "no converged " + std::string(to_string(baseline)) + " run for " +
                                                        std::string(to_string(r.problem)) +
                                                        " m=" + std::to_string(r.m));
        if (r.status != SolveStatus::Converged)
            continue;
        if (r.method == baseline)
        {
            su[j] = 1.0;
            continue;
        }
        const auto same_seed = group->second.find(r.seed);
        const RunRecord& base = same_seed != group->second.end() ? *same_seed->second : *group->second.begin()->second;
        su[j] = speedup_ratio(r.cpu_seconds, base.cpu_seconds);
    }
    for (std::size_t j = 0; j < records.size(); ++j)
        records[j].speedup = su[j];
}

void sort_records(std::vector<RunRecord>& records)
{
    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        if (a.problem != b.problem)
            return to_string(a.problem) < to_string(b.problem);
        if (a.m != b.m)
            return a.m < b.m;
        return to_string(a.method) < to_string(b.method);
    });
}

std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept
{
    if (name == "csv")
        return OutputFormat::Csv;
    if (name == "json")
        return OutputFormat::Json;
    return std::nullopt;
}

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string summary_csv(const std::vector<RunRecord>& records)
{
    std::string out(summary_header);
    out += '\n';
    for (const RunRecord& r : records)
    {
        out += to_string(r.method);
        out += ',';
        out += to_string(r.problem);
        out += ',' + std::to_string(r.m);
        out += ',' + format_double(r.theta);
        out += ',' + std::to_string(r.seed);
        out += ',';
        out += to_string(r.status);
        out += ',' + std::to_string(r.iterations);
        out += ',' + format_double(r.cpu_seconds);
        out += ',' + format_double(r.final_residual);
        out += ',' + optional_field(r.speedup);
        out += '\n';
    }
    return out;
}

std::string history_csv(const std::vector<HistoryRecord>& history)
{
    std::string out(history_header);
    out += '\n';
    for (const HistoryRecord& h : history)
    {
        out += std::to_string(h.k);
        out += ',' + format_double(h.residual_norm);
        out += ',' + optional_field(h.error_norm);
        if (h.step)
        {
            out += ',' + optional_field(h.step->alpha);
            out += ',' + optional_field(h.step->beta);
            out += ',' + optional_field(h.step->delta);
            out += ',' + std::to_string(h.step->block_size);
            out += ',' + h.step->label();
        }
        else
        {
            out += ",,,,,";
        }
        out += '\n';
    }
    return out;
}

std::vector<RunRecord> parse_summary_csv(std::string_view text)
{
    std::vector<RunRecord> out;
    bool header = true;
    for (std::string_view line : split(text, '\n'))
    {
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (header)
        {
            if (line != summary_header)
                parse_error("unexpected summary header");
            header = false;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 10)
            parse_error("summary row has " + std::to_string(f.size()) + " fields");
        RunRecord r;
        const auto method = parse_method(f[0]);
        const auto problem = parse_problem_kind(f[1]);
        const auto status = parse_status(f[5]);
        if (!method || !problem || !status)
            parse_error("unknown method, problem or status in '" + std::string(line) + "'");
        r.method = *method;
        r.problem = *problem;
        r.m = parse_unsigned<std::size_t>(f[2], "m");
        r.theta = parse_double(f[3], "theta");
        r.seed = parse_unsigned<std::uint64_t>(f[4], "seed");
        r.status = *status;
        r.iterations = parse_unsigned<std::size_t>(f[6], "iterations");
        r.cpu_seconds = parse_double(f[7], "cpu_seconds");
        r.final_residual = parse_double(f[8], "final_residual");
        if (!trim(f[9]).empty())
            r.speedup = parse_double(f[9], "speedup");
        out.push_back(std::move(r));
    }
    if (header)
        parse_error("missing summary header");
    return out;
}

std::string history_stem(const RunRecord& record)
{
    std::ostringstream s;
    s << to_string(record.problem) << "_m" << record.m << '_' << to_string(record.method) << "_s" << record.seed;
    return s.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    file.close();
    if (!file)
        throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

std::vector<std::filesystem::path> emit(std::vector<RunRecord> records, OutputFormat format,
                                        const std::filesystem::path& out_dir)
{
    sort_records(records);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

    const bool csv = format == OutputFormat::Csv;
    const std::string ext = csv ? ".csv" : ".json";
    std::vector<std::filesystem::path> written;

    const auto summary_path = out_dir / ("summary" + ext);
    write_text_file(summary_path, csv ? summary_csv(records) : summary_json(records).dump(2) + "\n");
    written.push_back(summary_path);

    const bool any_history = std::any_of(records.begin(), records.end(), [](const RunRecord& r) { return !r.history.empty(); });
    if (!any_history)
        return written;
    const auto history_dir = out_dir / "history";
    std::filesystem::create_directories(history_dir, ec);
    if (ec)
        throw Error(ErrorCode::IoFailure, "cannot create " + history_dir.string() + ": " + ec.message());
    for (const RunRecord& r : records)
    {
        if (r.history.empty())
            continue;
        const auto path = history_dir / (history_stem(r) + ext);
        write_text_file(path, csv ? history_csv(r.history) : history_json(r.history).dump(2) + "\n");
        written.push_back(path);
    }
    return written;
}

SuiteConfig parse_suite_config(std::string_view text)
{
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t line_no = 0;
    for (std::string_view line : split(text, '\n'))
    {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            parse_error("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (!kv.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
            parse_error("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }

    static const std::vector<std::string_view> known = {
        "problems", "sizes", "methods", "theta", "seeds", "tau_a", "tau_r", "max_iters", "epsilon", "beta_max",
        "history", "reference", "threads", "c", "rosenbrock_coupling", "allow_large"};
    for (const auto& [key, value] : kv)
        if (std::find(known.begin(), known.end(), key) == known.end())
            parse_error("unknown key '" + key + "'");

    const auto list = [&](std::string_view key, bool required) {
        std::vector<std::string_view> items;
        const auto it = kv.find(key);
        if (it == kv.end())
        {
            if (required)
                parse_error("missing key '" + std::string(key) + "'");
            return items;
        }
        for (std::string_view item : split(it->second, ','))
            if (!trim(item).empty())
                items.push_back(trim(item));
        if (items.empty())
            parse_error("empty list for '" + std::string(key) + "'");
        return items;
    };
    const auto scalar = [&](std::string_view key) -> std::optional<std::string_view> {
        const auto it = kv.find(key);
        if (it == kv.end())
            return std::nullopt;
        return std::string_view(it->second);
    };

    SuiteConfig config;
    StoppingConfig stop;
    if (auto v = scalar("tau_a"))
        stop.tau_a = parse_double(*v, "tau_a");
    if (auto v = scalar("tau_r"))
        stop.tau_r = parse_double(*v, "tau_r");
    if (auto v = scalar("max_iters"))
        stop.max_iterations = parse_unsigned<std::size_t>(*v, "max_iters");
    try
    {
        validate(stop);
    }
    catch (const Error& e)
    {
        parse_error(e.what());
    }

    if (auto v = scalar("history"))
        config.options.history = parse_bool(*v, "history");
    if (auto v = scalar("reference"))
        config.options.reference = parse_bool(*v, "reference");
    if (auto v = scalar("threads"))
        config.options.threads = parse_unsigned<std::size_t>(*v, "threads");
    if (kv.count("seeds"))
    {
        config.options.seeds.clear();
        for (std::string_view s : list("seeds", true))
            config.options.seeds.push_back(parse_unsigned<std::uint64_t>(s, "seeds"));
    }

    std::optional<double> theta;
    if (auto v = scalar("theta"))
        theta = parse_double(*v, "theta");

    ProblemSpec base_spec;
    if (auto v = scalar("c"))
        base_spec.c = parse_double(*v, "c");
    if (auto v = scalar("rosenbrock_coupling"))
        base_spec.rosenbrock_coupling = parse_double(*v, "rosenbrock_coupling");
    if (auto v = scalar("allow_large"))
        base_spec.allow_large = parse_bool(*v, "allow_large");

    std::vector<ProblemKind> problems;
    for (std::string_view p : list("problems", true))
    {
        const auto kind = parse_problem_kind(p);
        if (!kind)
            parse_error("unknown problem '" + std::string(p) + "'");
        problems.push_back(*kind);
    }
    std::vector<std::size_t> sizes;
    for (std::string_view s : list("sizes", true))
        sizes.push_back(parse_unsigned<std::size_t>(s, "sizes"));
    std::vector<Method> methods;
    for (std::string_view name : list("methods", true))
    {
        const auto method = parse_method(name);
        if (!method)
            parse_error("unknown method '" + std::string(name) + "'");
        methods.push_back(*method);
    }

    for (ProblemKind kind : problems)
        for (std::size_t m : sizes)
            for (Method method : methods)
            {
                SuiteCell cell;
                cell.problem = base_spec;
                cell.problem.kind = kind;
                cell.problem.m = m;
                cell.method = default_config(method);
                cell.method.theta = theta.value_or(default_theta(kind));
                if (auto v = scalar("epsilon"))
                    cell.method.epsilon = parse_double(*v, "epsilon");
                if (auto v = scalar("beta_max"))
                    cell.method.beta_max = parse_double(*v, "beta_max");
                try
                {
                    validate(cell.method);
                }
                catch (const Error& e)
                {
                    parse_error(e.what());
                }
                cell.stop = stop;
                config.cells.push_back(cell);
            }
    return config;
}

} // namespace nlk
