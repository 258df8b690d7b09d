#ifndef NLK_SOLVERS_HPP
#define NLK_SOLVERS_HPP

#include "nlk/lsqr.hpp"
#include "nlk/selection.hpp"
#include "nlk/stopping.hpp"
#include "nlk/system.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlk
{

enum class Method
{
    ABNKAm,      ///< averaged block, adaptive momentum, hybrid fallback
    ABNKAmIdeal, ///< adaptive momentum without beta truncation
    ABNK2,       ///< averaged block, extrapolated step, no momentum
    ABNKmConst,  ///< averaged block, constant step and momentum
    NK,          ///< cyclic row
    NURK,        ///< uniformly random row
    MRNK,        ///< maximum-residual row
    NGRK,        ///< greedy randomized row
    NGRKm,       ///< greedy randomized row with heavy-ball momentum
    MRBNK,       ///< greedy block, pseudoinverse via LSQR
    RBCNK,       ///< capped block, pseudoinverse via LSQR
};

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;
bool is_randomized(Method method) noexcept;

enum class WeightMode
{
    Natural, ///< w_i proportional to |grad F_i|^2
    Uniform, ///< w_i = 1 / |J|
};

struct MethodConfig
{
    Method method = Method::ABNKAm;
    double theta = 0.5;
    double epsilon = 1e-16;
    double beta_max = std::numeric_limits<double>::infinity();
    double const_alpha = 1.0;
    double const_beta = 0.0;
    WeightMode weights = WeightMode::Natural;
    std::uint64_t seed = 0;
    LsqrConfig lsqr{};
};

/// Per-method defaults (NGRKm gets const_beta = 0.3).
MethodConfig default_config(Method method);

/// Throws InvalidArgument on out-of-range parameters.
void validate(const MethodConfig& config);

struct IterationState
{
    Vector x;
    std::optional<Vector> x_prev;
    Vector r; ///< F(x)
    std::size_t k = 0;
};

/// State at k = 0. Evaluates F(x0).
IterationState initial_state(const NonlinearSystem& system, std::span<const double> x0);

struct AdaptiveParams
{
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double s = 0.0;
};

/// Gap Delta = |d|^2 |dx|^2 - <d, dx>^2 and, when Delta != 0,
/// alpha = |dx|^2 s / Delta, beta = <dx, d> s / Delta. With Delta == 0 the
/// returned alpha and beta are 0; the caller decides the branch.
AdaptiveParams adaptive_params(std::span<const double> d, std::span<const double> dx, double s);

/// sin^2 of the angle between d and dx, clamped to [0, 1].
double momentum_angle(const AdaptiveParams& params, std::span<const double> d, std::span<const double> dx);

struct BlockQuantities
{
    Vector d;                          ///< averaged projection direction
    double s = 0.0;                    ///< sum w_i F_i^2 / |grad F_i|^2
    double block_residual_sq = 0.0;    ///< sum_{i in J} F_i^2
    double frobenius_sq = 0.0;         ///< sum_{i in J} |grad F_i|^2
};

/// Throws ZeroGradientRow when some selected row has a zero gradient.
BlockQuantities block_quantities(const NonlinearSystem& system, std::span<const std::size_t> rows,
                                 std::span<const double> x, std::span<const double> r, WeightMode weights);

enum class Branch
{
    Fallback,
    Momentum,
    Constant,
    Row,
    Pseudoinverse,
};

std::string_view to_string(Branch branch) noexcept;

struct StepInfo
{
    Branch branch = Branch::Fallback;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> delta;
    std::optional<double> sin2;
    std::size_t block_size = 0;
    bool stagnant = false;       ///< x_k == x_{k-1} with a nonzero residual
    bool lsqr_max_inner = false; ///< inner solve ran out of budget
    /// Human-readable label, e.g. "fallback" or "pseudoinverse_maxinner".
    std::string label() const;
};

struct StepResult
{
    IterationState state;
    StepInfo info;
};

StepResult abnkam_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config);
StepResult abnkam_ideal_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config);
StepResult abnk2_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config);
StepResult abnkm_const_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config);

/// x - alpha F_i / |grad F_i|^2 grad F_i + beta (x - x_prev).
StepResult row_step(const NonlinearSystem& system, const IterationState& state, std::size_t i, double alpha, double beta);

/// x - (F'_J)^+ F_J with the pseudoinverse applied by LSQR.
StepResult block_pseudoinverse_step(const NonlinearSystem& system, const IterationState& state,
                                    std::span<const std::size_t> rows, const LsqrConfig& lsqr);

enum class SolveStatus
{
    Converged,
    MaxIterations,
    EvaluationFailure,
};

std::string_view to_string(SolveStatus status) noexcept;
std::optional<SolveStatus> parse_status(std::string_view name) noexcept;

struct HistoryRecord
{
    std::size_t k = 0;
    double residual_norm = 0.0;
    std::optional<double> error_norm;
    /// Parameters of the step taken from x_k; absent on the final record.
    std::optional<StepInfo> step;
};

struct SolveOptions
{
    bool record_history = false;
    std::optional<Vector> x_ref;
};

struct SolveReport
{
    SolveStatus status = SolveStatus::MaxIterations;
    std::size_t iterations = 0;
    double wall_seconds = 0.0;
    double initial_residual_norm = 0.0;
    double final_residual_norm = 0.0;
    Vector x;
    std::vector<HistoryRecord> history;
    std::string failure; ///< message when status is EvaluationFailure
};

///
/// Runs the configured method from x0 until the stopping rule fires.
/// Evaluation errors inside the loop end the solve with EvaluationFailure
/// and the failing iteration index in `failure`; argument errors throw.
///
SolveReport solve(const NonlinearSystem& system, std::span<const double> x0, const MethodConfig& config,
                  const StoppingConfig& stop, const SolveOptions& options = {});

} // namespace nlk

#endif // NLK_SOLVERS_HPP
