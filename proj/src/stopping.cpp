#include "nlk/stopping.hpp"

#include "nlk/types.hpp"

namespace nlk
{

void validate(const StoppingConfig& cfg)
{
    if (!(cfg.tau_a >= 0.0) || !(cfg.tau_r >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "stopping tolerances must be nonnegative");
    if (cfg.tau_a == 0.0 && cfg.tau_r == 0.0)
        throw Error(ErrorCode::InvalidArgument, "tau_a and tau_r cannot both be zero");
    if (cfg.max_iterations < 1)
        throw Error(ErrorCode::InvalidArgument, "max_iterations must be at least 1");
}

StopDecision should_stop(double residual_norm, double r0_norm, std::size_t k, const StoppingConfig& cfg) noexcept
{
    if (residual_norm <= cfg.tau_a + cfg.tau_r * r0_norm)
        return StopDecision::Converged;
    if (k >= cfg.max_iterations)
        return StopDecision::MaxIterations;
    return StopDecision::Continue;
}

StopDecision should_stop(std::span<const double> r, double r0_norm, std::size_t k, const StoppingConfig& cfg) noexcept
{
    return should_stop(norm2(r), r0_norm, k, cfg);
}

} // namespace nlk
