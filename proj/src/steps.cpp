#include "nlk/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace nlk
{

namespace
{

StepResult finish(const NonlinearSystem& system, const IterationState& state, Vector x_next, StepInfo info)
{
    if (!all_finite(x_next))
        throw Error(ErrorCode::NonFiniteValue, "step produced a non-finite iterate");
    StepResult out;
    out.state.r = residual(system, x_next);
    out.state.x = std::move(x_next);
    out.state.x_prev = state.x;
    out.state.k = state.k + 1;
    out.info = std::move(info);
    return out;
}

Vector displacement(const IterationState& state)
{
    Vector dx(state.x.size());
    for (std::size_t j = 0; j < dx.size(); ++j)
        dx[j] = state.x[j] - (*state.x_prev)[j];
    return dx;
}

void check_nonzero_residual(const IterationState& state)
{
    for (double v : state.r)
        if (v != 0.0)
            return;
    throw Error(ErrorCode::ZeroResidual, "step requested at a root");
}

// x - (s / |d|^2) d: the one-parameter projection along d.
StepResult fallback_step(const NonlinearSystem& system, const IterationState& state,
                         const BlockQuantities& q, std::size_t block_size, StepInfo info)
{
    const double dd = squared_norm(q.d);
    if (dd == 0.0)
        throw Error(ErrorCode::ZeroDirection, "block direction vanished (stationary point of the block objective)");
    const double alpha = q.s / dd;
    Vector x_next = state.x;
    for (std::size_t j = 0; j < x_next.size(); ++j)
        x_next[j] -= alpha * q.d[j];
    info.branch = Branch::Fallback;
    info.alpha = alpha;
    info.beta = 0.0;
    info.block_size = block_size;
    return finish(system, state, std::move(x_next), std::move(info));
}

enum class Truncation
{
    Practical, // momentum needs |Delta| >= eps and beta in (0, beta_max)
    Ideal,     // momentum needs |Delta| >= eps only
};

StepResult adaptive_step(const NonlinearSystem& system, const IterationState& state,
                         const MethodConfig& config, Truncation truncation)
{
    check_nonzero_residual(state);
    const IndexSet rows = greedy_threshold_set(state.r, config.theta);
    const BlockQuantities q = block_quantities(system, rows, state.x, state.r, config.weights);

    StepInfo info;
    if (!state.x_prev)
        return fallback_step(system, state, q, rows.size(), std::move(info));

    const Vector dx = displacement(state);
    const AdaptiveParams p = adaptive_params(q.d, dx, q.s);
    info.stagnant = squared_norm(dx) == 0.0;
    if (squared_norm(q.d) > 0.0 && !info.stagnant)
        info.sin2 = momentum_angle(p, q.d, dx);

    // The guard is applied to the gap of the unnormalized direction
    // (F'_J)^T F_J = |F'_J|_F^2 d, so epsilon is measured on that scale.
    const double guard_gap = p.delta * q.frobenius_sq * q.frobenius_sq;
    info.delta = guard_gap;
    // beta is only meaningful when the gap is safely away from zero.
    bool momentum = std::abs(guard_gap) >= config.epsilon && p.delta != 0.0;
    if (momentum && truncation == Truncation::Practical)
        momentum = p.beta > 0.0 && p.beta < config.beta_max;
    if (!momentum)
        return fallback_step(system, state, q, rows.size(), std::move(info));

    Vector x_next = state.x;
    for (std::size_t j = 0; j < x_next.size(); ++j)
        x_next[j] += -p.alpha * q.d[j] + p.beta * dx[j];
    info.branch = Branch::Momentum;
    info.alpha = p.alpha;
    info.beta = p.beta;
    info.block_size = rows.size();
    return finish(system, state, std::move(x_next), std::move(info));
}

} // namespace

IterationState initial_state(const NonlinearSystem& system, std::span<const double> x0)
{
    IterationState state;
    state.r = residual(system, x0);
    state.x.assign(x0.begin(), x0.end());
    return state;
}

AdaptiveParams adaptive_params(std::span<const double> d, std::span<const double> dx, double s)
{
    if (d.size() != dx.size())
        throw Error(ErrorCode::DimensionMismatch, "direction and displacement differ in length");
    AdaptiveParams p;
    p.s = s;
    const double dd = squared_norm(d);
    const double xx = squared_norm(dx);
    const double dxd = dot(dx, d);
    p.delta = dd * xx - dxd * dxd;
    if (p.delta != 0.0)
    {
        p.alpha = xx * s / p.delta;
        p.beta = dxd * s / p.delta;
    }
    return p;
}

double momentum_angle(const AdaptiveParams& params, std::span<const double> d, std::span<const double> dx)
{
    const double denom = squared_norm(d) * squared_norm(dx);
    if (!(denom > 0.0))
        return 0.0;
    return std::clamp(params.delta / denom, 0.0, 1.0);
}

BlockQuantities block_quantities(const NonlinearSystem& system, std::span<const std::size_t> rows,
                                 std::span<const double> x, std::span<const double> r, WeightMode weights)
{
    BlockQuantities q;
    q.d.assign(x.size(), 0.0);
    const double inv_count = 1.0 / static_cast<double>(rows.size());
    double weighted_s = 0.0;
    if (r.size() != system.equations())
        throw Error(ErrorCode::DimensionMismatch, "residual does not match the system");
    for_each_jacobian_row(system, rows, x, [&](std::size_t, std::size_t i, const SparseRow& row) {
        const double nsq = row.squared_norm();
        if (nsq == 0.0)
            throw Error(ErrorCode::ZeroGradientRow, "row " + std::to_string(i) + " has a zero gradient");
        const double fi = r[i];
        q.frobenius_sq += nsq;
        q.block_residual_sq += fi * fi;
        if (weights == WeightMode::Natural)
        {
            row.axpy_into(fi, q.d);
        }
        else
        {
            row.axpy_into(inv_count * fi / nsq, q.d);
            weighted_s += inv_count * fi * fi / nsq;
        }
    });
    if (weights == WeightMode::Natural)
    {
        // w_i = |grad F_i|^2 / |F'_J|_F^2 collapses the sum to (F'_J)^T F_J / |F'_J|_F^2.
        const double inv = 1.0 / q.frobenius_sq;
        for (double& v : q.d)
            v *= inv;
        q.s = q.block_residual_sq * inv;
    }
    else
    {
        q.s = weighted_s;
    }
    return q;
}

std::string_view to_string(Branch branch) noexcept
{
    switch (branch)
    {
    case Branch::Fallback: return "fallback";
    case Branch::Momentum: return "momentum";
    case Branch::Constant: return "constant";
    case Branch::Row: return "row";
    case Branch::Pseudoinverse: return "pseudoinverse";
    }
    return "unknown";
}

std::string StepInfo::label() const
{
    std::string out(to_string(branch));
    if (stagnant)
        out += "_stagnant";
    if (lsqr_max_inner)
        out += "_maxinner";
    return out;
}

StepResult abnkam_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config)
{
    return adaptive_step(system, state, config, Truncation::Practical);
}

StepResult abnkam_ideal_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config)
{
    return adaptive_step(system, state, config, Truncation::Ideal);
}

StepResult abnk2_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config)
{
    check_nonzero_residual(state);
    const IndexSet rows = greedy_threshold_set(state.r, config.theta);
    const BlockQuantities q = block_quantities(system, rows, state.x, state.r, config.weights);
    return fallback_step(system, state, q, rows.size(), StepInfo{});
}

StepResult abnkm_const_step(const NonlinearSystem& system, const IterationState& state, const MethodConfig& config)
{
    check_nonzero_residual(state);
    const IndexSet rows = greedy_threshold_set(state.r, config.theta);
    const BlockQuantities q = block_quantities(system, rows, state.x, state.r, config.weights);
    const double alpha = config.const_alpha;
    const double beta = state.x_prev ? config.const_beta : 0.0;
    Vector x_next = state.x;
    for (std::size_t j = 0; j < x_next.size(); ++j)
        x_next[j] -= alpha * q.d[j];
    if (state.x_prev && beta != 0.0)
        for (std::size_t j = 0; j < x_next.size(); ++j)
            x_next[j] += beta * (state.x[j] - (*state.x_prev)[j]);
    StepInfo info;
    info.branch = Branch::Constant;
    info.alpha = alpha;
    info.beta = beta;
    info.block_size = rows.size();
    return finish(system, state, std::move(x_next), std::move(info));
}

StepResult row_step(const NonlinearSystem& system, const IterationState& state, std::size_t i, double alpha, double beta)
{
    const SparseRow row = jacobian_row(system, i, state.x);
    const double nsq = row.squared_norm();
    if (nsq == 0.0)
        throw Error(ErrorCode::ZeroGradientRow, "row " + std::to_string(i) + " has a zero gradient");
    Vector x_next = state.x;
    const double used_beta = state.x_prev ? beta : 0.0;
    if (used_beta != 0.0)
        for (std::size_t j = 0; j < x_next.size(); ++j)
            x_next[j] += used_beta * (state.x[j] - (*state.x_prev)[j]);
    row.axpy_into(-alpha * state.r[i] / nsq, x_next);
    StepInfo info;
    info.branch = Branch::Row;
    info.alpha = alpha;
    info.beta = used_beta;
    info.block_size = 1;
    return finish(system, state, std::move(x_next), std::move(info));
}

StepResult block_pseudoinverse_step(const NonlinearSystem& system, const IterationState& state,
                                    std::span<const std::size_t> rows, const LsqrConfig& lsqr)
{
    const std::vector<SparseRow> block = jacobian_block(system, rows, state.x);

    // The minimum-norm solution lives in the row space, so LSQR only needs
    // the columns some selected row touches.
    std::vector<std::size_t> columns;
    for (const auto& row : block)
        columns.insert(columns.end(), row.indices.begin(), row.indices.end());
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
    if (columns.empty())
        throw Error(ErrorCode::ZeroGradientRow, "selected block has no structural entries");

    std::vector<std::vector<std::pair<std::size_t, double>>> local(block.size());
    bool any_nonzero = false;
    for (std::size_t b = 0; b < block.size(); ++b)
    {
        local[b].reserve(block[b].nnz());
        for (std::size_t k = 0; k < block[b].nnz(); ++k)
        {
            const auto it = std::lower_bound(columns.begin(), columns.end(), block[b].indices[k]);
            local[b].emplace_back(static_cast<std::size_t>(it - columns.begin()), block[b].values[k]);
            any_nonzero = any_nonzero || block[b].values[k] != 0.0;
        }
    }
    if (!any_nonzero)
        throw Error(ErrorCode::ZeroGradientRow, "selected block is identically zero");

    LinearOperator op;
    op.rows = block.size();
    op.cols = columns.size();
    op.apply = [&local](std::span<const double> v, std::span<double> out) {
        for (std::size_t b = 0; b < local.size(); ++b)
        {
            double s = 0.0;
            for (const auto& [j, a] : local[b])
                s += a * v[j];
            out[b] = s;
        }
    };
    op.apply_adjoint = [&local](std::span<const double> u, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t b = 0; b < local.size(); ++b)
            for (const auto& [j, a] : local[b])
                out[j] += a * u[b];
    };

    Vector rhs(rows.size());
    for (std::size_t b = 0; b < rows.size(); ++b)
        rhs[b] = state.r[rows[b]];
    const LsqrOutcome solved = lsqr_solve(op, rhs, lsqr);

    Vector x_next = state.x;
    for (std::size_t c = 0; c < columns.size(); ++c)
        x_next[columns[c]] -= solved.solution[c];

    StepInfo info;
    info.branch = Branch::Pseudoinverse;
    info.alpha = 1.0;
    info.beta = 0.0;
    info.block_size = rows.size();
    info.lsqr_max_inner = solved.stop == LsqrStop::MaxInner;
    return finish(system, state, std::move(x_next), std::move(info));
}

} // namespace nlk
