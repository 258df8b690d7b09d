#include "support/check.hpp"

#include "nlk/stopping.hpp"
#include "nlk/selection.hpp"

#include <random>

using namespace nlk;

TEST_CASE("stopping decisions")
{
    const StoppingConfig cfg;
    CHECK(should_stop(Vector(5, 0.0), 3.0, 0, cfg) == StopDecision::Converged);
    CHECK(should_stop(1e-6, 1.0, 7, cfg) == StopDecision::Converged);
    CHECK(should_stop(1.02e-6, 1.0, 7, cfg) == StopDecision::Continue);
    CHECK(should_stop(1.0, 1.0, 100000, cfg) == StopDecision::MaxIterations);
    CHECK(should_stop(1.0, 1.0, 99999, cfg) == StopDecision::Continue);
    CHECK(should_stop(0.0, 1.0, 100000, cfg) == StopDecision::Converged);
    CHECK(should_stop(Vector{3e-7, 4e-7}, 0.0, 1, cfg) == StopDecision::Converged);
}

TEST_CASE("stopping is monotone in the residual norm")
{
    Rng rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const StoppingConfig cfg{.tau_a = 1e-3, .tau_r = 1e-2, .max_iterations = 10};
    for (int t = 0; t < 1000; ++t)
    {
        const double r0 = 10.0 * u(rng);
        const double a = 0.1 * u(rng);
        if (should_stop(a, r0, 3, cfg) == StopDecision::Converged)
            CHECK(should_stop(a * u(rng), r0, 3, cfg) == StopDecision::Converged);
    }
}

TEST_CASE("stopping configuration validation")
{
    CHECK_NOTHROW(validate(StoppingConfig{}));
    CHECK_NOTHROW(validate(StoppingConfig{.tau_a = 0.0}));
    CHECK_ERROR(validate(StoppingConfig{.tau_a = 0.0, .tau_r = 0.0}), ErrorCode::InvalidArgument);
    CHECK_ERROR(validate(StoppingConfig{.tau_a = -1.0}), ErrorCode::InvalidArgument);
    CHECK_ERROR(validate(StoppingConfig{.max_iterations = 0}), ErrorCode::InvalidArgument);
}
