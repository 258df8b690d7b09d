#include "nlk/solvers.hpp"

#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <utility>

namespace nlk
{

namespace
{

constexpr std::array<std::pair<Method, std::string_view>, 11> kMethodNames{{
    {Method::ABNKAm, "abnkam"},
    {Method::ABNKAmIdeal, "abnkam_ideal"},
    {Method::ABNK2, "abnk2"},
    {Method::ABNKmConst, "abnkm_const"},
    {Method::NK, "nk"},
    {Method::NURK, "nurk"},
    {Method::MRNK, "mrnk"},
    {Method::NGRK, "ngrk"},
    {Method::NGRKm, "ngrkm"},
    {Method::MRBNK, "mrbnk"},
    {Method::RBCNK, "rbcnk"},
}};

std::string fold(std::string_view name)
{
    std::string out;
    for (char ch : name)
    {
        if (ch == '-')
            out.push_back('_');
        else
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

class Stepper
{
public:
    Stepper(const NonlinearSystem& system, const MethodConfig& config)
        : system_(system), config_(config), rng_(config.seed)
    {
    }

    StepResult operator()(const IterationState& state)
    {
        switch (config_.method)
        {
        case Method::ABNKAm: return abnkam_step(system_, state, config_);
        case Method::ABNKAmIdeal: return abnkam_ideal_step(system_, state, config_);
        case Method::ABNK2: return abnk2_step(system_, state, config_);
        case Method::ABNKmConst: return abnkm_const_step(system_, state, config_);
        case Method::NK: return row_step(system_, state, state.k % system_.equations(), 1.0, 0.0);
        case Method::NURK: {
            const std::size_t i = sample_index(state.r, {SelectionKind::UniformRandom, config_.theta}, rng_);
            return row_step(system_, state, i, 1.0, 0.0);
        }
        case Method::MRNK: return row_step(system_, state, max_residual_index(state.r), 1.0, 0.0);
        case Method::NGRK: {
            const std::size_t i = sample_index(state.r, {SelectionKind::GreedyRandomized, config_.theta}, rng_);
            return row_step(system_, state, i, config_.const_alpha, 0.0);
        }
        case Method::NGRKm: {
            const std::size_t i = sample_index(state.r, {SelectionKind::GreedyRandomized, config_.theta}, rng_);
            return row_step(system_, state, i, config_.const_alpha, config_.const_beta);
        }
        case Method::MRBNK:
            return block_pseudoinverse_step(system_, state, greedy_threshold_set(state.r, config_.theta), config_.lsqr);
        case Method::RBCNK:
            return block_pseudoinverse_step(system_, state, capped_set(state.r, config_.theta), config_.lsqr);
        }
        throw Error(ErrorCode::InvalidArgument, "unknown method");
    }

private:
    const NonlinearSystem& system_;
    const MethodConfig& config_;
    Rng rng_;
};

std::optional<double> error_norm(const SolveOptions& options, std::span<const double> x)
{
    if (!options.x_ref)
        return std::nullopt;
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
    {
        const double e = x[j] - (*options.x_ref)[j];
        s += e * e;
    }
    return std::sqrt(s);
}

} // namespace

std::string_view to_string(Method method) noexcept
{
    for (const auto& [m, name] : kMethodNames)
        if (m == method)
            return name;
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept
{
    const std::string key = fold(name);
    for (const auto& [m, canonical] : kMethodNames)
        if (key == canonical)
            return m;
    if (key == "rb_cnk")
        return Method::RBCNK;
    return std::nullopt;
}

bool is_randomized(Method method) noexcept
{
    return method == Method::NURK || method == Method::NGRK || method == Method::NGRKm;
}

MethodConfig default_config(Method method)
{
    MethodConfig config;
    config.method = method;
    if (method == Method::NGRKm)
        config.const_beta = 0.3;
    return config;
}

void validate(const MethodConfig& config)
{
    if (!(config.theta > 0.0 && config.theta <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, 1]");
    if (!(config.epsilon >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "epsilon must be nonnegative");
    if (!(config.beta_max > 0.0))
        throw Error(ErrorCode::InvalidArgument, "beta_max must be positive");
    if (config.method == Method::ABNKmConst && !(config.const_alpha > 0.0 && config.const_alpha < 2.0))
        throw Error(ErrorCode::InvalidArgument, "constant step size must lie in (0, 2)");
    if (!std::isfinite(config.const_alpha) || !std::isfinite(config.const_beta))
        throw Error(ErrorCode::InvalidArgument, "constant step parameters must be finite");
    if (!(config.lsqr.atol > 0.0) || !(config.lsqr.btol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "LSQR tolerances must be positive");
}

std::string_view to_string(SolveStatus status) noexcept
{
    switch (status)
    {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::EvaluationFailure: return "evaluation_failure";
    }
    return "unknown";
}

std::optional<SolveStatus> parse_status(std::string_view name) noexcept
{
    for (auto s : {SolveStatus::Converged, SolveStatus::MaxIterations, SolveStatus::EvaluationFailure})
        if (name == to_string(s))
            return s;
    return std::nullopt;
}

SolveReport solve(const NonlinearSystem& system, std::span<const double> x0, const MethodConfig& config,
                  const StoppingConfig& stop, const SolveOptions& options)
{
    validate(config);
    validate(stop);
    if (x0.size() != system.unknowns())
        throw Error(ErrorCode::DimensionMismatch, "initial point does not match the system");
    if (options.x_ref && options.x_ref->size() != system.unknowns())
        throw Error(ErrorCode::DimensionMismatch, "reference point does not match the system");

    SolveReport report;
    Stepper step(system, config);
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();

    IterationState state;
    try
    {
        state = initial_state(system, x0);
    }
    catch (const Error& e)
    {
        report.status = SolveStatus::EvaluationFailure;
        report.failure = std::string("iteration 0: ") + e.what();
        report.x.assign(x0.begin(), x0.end());
        report.wall_seconds = std::chrono::duration<double>(clock::now() - started).count();
        return report;
    }

    const double r0_norm = norm2(state.r);
    report.initial_residual_norm = r0_norm;
    double r_norm = r0_norm;

    while (true)
    {
        const StopDecision decision = should_stop(r_norm, r0_norm, state.k, stop);
        if (decision != StopDecision::Continue)
        {
            report.status = decision == StopDecision::Converged ? SolveStatus::Converged : SolveStatus::MaxIterations;
            break;
        }

        HistoryRecord record;
        if (options.record_history)
        {
            record.k = state.k;
            record.residual_norm = r_norm;
            record.error_norm = error_norm(options, state.x);
        }

        try
        {
            StepResult next = step(state);
            state = std::move(next.state);
            if (options.record_history)
                record.step = std::move(next.info);
        }
        catch (const Error& e)
        {
            report.status = SolveStatus::EvaluationFailure;
            report.failure = "iteration " + std::to_string(state.k) + ": " + e.what();
            if (options.record_history)
                report.history.push_back(std::move(record));
            break;
        }
        if (options.record_history)
            report.history.push_back(std::move(record));
        r_norm = norm2(state.r);
    }

    report.wall_seconds = std::chrono::duration<double>(clock::now() - started).count();
    report.iterations = state.k;
    report.final_residual_norm = r_norm;
    if (options.record_history && report.status != SolveStatus::EvaluationFailure)
    {
        HistoryRecord last;
        last.k = state.k;
        last.residual_norm = r_norm;
        last.error_norm = error_norm(options, state.x);
        report.history.push_back(std::move(last));
    }
    report.x = std::move(state.x);
    return report;
}

} // namespace nlk
