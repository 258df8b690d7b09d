#include "nlk/system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlk
{

namespace
{

void check_point(const NonlinearSystem& system, std::span<const double> x)
{
    if (x.size() != system.unknowns())
        throw Error(ErrorCode::DimensionMismatch,
                    "point has dimension " + std::to_string(x.size()) + ", system expects " +
                        std::to_string(system.unknowns()));
    if (!all_finite(x))
        throw Error(ErrorCode::NonFiniteValue, "point has non-finite entries");
}

void check_row_index(const NonlinearSystem& system, std::size_t i)
{
    if (i >= system.equations())
        throw Error(ErrorCode::IndexOutOfRange,
                    "row " + std::to_string(i) + " outside [0, " +
                        std::to_string(system.equations()) + ")");
}

} // namespace

namespace detail
{

void check_row_values(const SparseRow& row, std::size_t i)
{
    for (double v : row.values)
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFiniteValue,
                        "gradient of row " + std::to_string(i) + " is not finite");
}

void check_block_request(const NonlinearSystem& system, std::span<const std::size_t> rows,
                         std::span<const double> x)
{
    if (rows.empty())
        throw Error(ErrorCode::InvalidArgument, "empty row block");
    for (std::size_t i : rows)
        check_row_index(system, i);
    check_point(system, x);
}

} // namespace detail

using detail::check_row_values;

double NonlinearSystem::component(std::size_t i, std::span<const double> x) const
{
    Vector out(equations());
    evaluate(x, out);
    return out[i];
}

std::vector<SparseRow> NonlinearSystem::gradient_block(std::span<const std::size_t> rows,
                                                       std::span<const double> x) const
{
    std::vector<SparseRow> block;
    block.reserve(rows.size());
    for (std::size_t i : rows)
        block.push_back(gradient(i, x));
    return block;
}

void residual_into(const NonlinearSystem& system, std::span<const double> x, Vector& out)
{
    check_point(system, x);
    out.resize(system.equations());
    system.evaluate(x, out);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!std::isfinite(out[i]))
            throw Error(ErrorCode::NonFiniteValue,
                        "component " + std::to_string(i) + " evaluated to a non-finite value");
}

Vector residual(const NonlinearSystem& system, std::span<const double> x)
{
    Vector out;
    residual_into(system, x, out);
    return out;
}

SparseRow jacobian_row(const NonlinearSystem& system, std::size_t i, std::span<const double> x)
{
    check_row_index(system, i);
    check_point(system, x);
    SparseRow row = system.gradient(i, x);
    check_row_values(row, i);
    return row;
}

std::vector<SparseRow> jacobian_block(const NonlinearSystem& system,
                                      std::span<const std::size_t> rows,
                                      std::span<const double> x)
{
    detail::check_block_request(system, rows, x);
    auto block = system.gradient_block(rows, x);
    for (std::size_t j = 0; j < block.size(); ++j)
        check_row_values(block[j], rows[j]);
    return block;
}

namespace
{

template <typename StepFn>
Vector central_difference_row(const NonlinearSystem& system, std::size_t i,
                              std::span<const double> x, StepFn step)
{
    check_row_index(system, i);
    check_point(system, x);
    const std::size_t n = system.unknowns();
    Vector xp(x.begin(), x.end());
    Vector out(n);
    for (std::size_t j = 0; j < n; ++j)
    {
        const double saved = xp[j];
        const double h = step(saved);
        xp[j] = saved + h;
        const double fp = system.component(i, xp);
        xp[j] = saved - h;
        const double fm = system.component(i, xp);
        xp[j] = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw Error(ErrorCode::NonFiniteValue, "perturbed evaluation is not finite");
        out[j] = (fp - fm) / (2.0 * h);
    }
    return out;
}

} // namespace

Vector fd_jacobian_row(const NonlinearSystem& system, std::size_t i,
                       std::span<const double> x, double h)
{
    if (!(h > 0.0))
        throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    return central_difference_row(system, i, x, [h](double) { return h; });
}

Vector fd_jacobian_row_scaled(const NonlinearSystem& system, std::size_t i,
                              std::span<const double> x, double rel_step)
{
    if (!(rel_step > 0.0))
        throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    return central_difference_row(system, i, x, [rel_step](double xj) {
        return rel_step * std::max(1.0, std::abs(xj));
    });
}

} // namespace nlk
