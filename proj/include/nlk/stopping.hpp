#ifndef NLK_STOPPING_HPP
#define NLK_STOPPING_HPP

#include <cstddef>
#include <span>

namespace nlk
{

struct StoppingConfig
{
    double tau_a = 1e-6;
    double tau_r = 1e-8;
    std::size_t max_iterations = 100000;
};

enum class StopDecision
{
    Continue,
    Converged,
    MaxIterations,
};

/// Throws InvalidArgument if the configuration is unusable.
void validate(const StoppingConfig& cfg);

/// Converged iff |r| <= tau_a + tau_r |r_0|, checked before the iteration cap.
StopDecision should_stop(double residual_norm, double r0_norm, std::size_t k, const StoppingConfig& cfg) noexcept;
StopDecision should_stop(std::span<const double> r, double r0_norm, std::size_t k, const StoppingConfig& cfg) noexcept;

} // namespace nlk

#endif // NLK_STOPPING_HPP
