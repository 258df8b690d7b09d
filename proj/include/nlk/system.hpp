#ifndef NLK_SYSTEM_HPP
#define NLK_SYSTEM_HPP

#include "nlk/types.hpp"

#include <span>
#include <vector>

namespace nlk
{

///
/// A nonlinear system F : R^n -> R^m evaluated matrix-free.
///
/// Implementations provide the full residual and individual Jacobian rows.
/// Both evaluators must be pure and reentrant: the solvers may call them
/// from several threads over one shared instance.
///
class NonlinearSystem
{
public:
    virtual ~NonlinearSystem() = default;

    virtual std::size_t equations() const noexcept = 0;
    virtual std::size_t unknowns() const noexcept = 0;

    /// Writes F(x) into `out` (size m). Inputs have been validated.
    virtual void evaluate(std::span<const double> x, std::span<double> out) const = 0;

    /// Gradient of F_i at x. Inputs have been validated.
    virtual SparseRow gradient(std::size_t i, std::span<const double> x) const = 0;

    /// Value of a single component. The default evaluates the full residual.
    virtual double component(std::size_t i, std::span<const double> x) const;

    /// Rows J[0], J[1], ... in order. Overridable for systems that can share
    /// work across rows of one block.
    virtual std::vector<SparseRow> gradient_block(std::span<const std::size_t> rows,
                                                  std::span<const double> x) const;
};

/// F(x). Throws DimensionMismatch or NonFiniteValue.
Vector residual(const NonlinearSystem& system, std::span<const double> x);

/// Same as residual() but reuses `out`.
void residual_into(const NonlinearSystem& system, std::span<const double> x, Vector& out);

SparseRow jacobian_row(const NonlinearSystem& system, std::size_t i, std::span<const double> x);

std::vector<SparseRow> jacobian_block(const NonlinearSystem& system,
                                      std::span<const std::size_t> rows,
                                      std::span<const double> x);

/// Streams the rows of a block to `visit(position, row_index, row)` without
/// holding the whole block in memory. The point is validated once.
template <typename Visitor>
void for_each_jacobian_row(const NonlinearSystem& system, std::span<const std::size_t> rows,
                           std::span<const double> x, Visitor&& visit);

/// Central-difference approximation of row i of the Jacobian, one column at
/// a time. Only meant as a test oracle; costs 2n component evaluations.
Vector fd_jacobian_row(const NonlinearSystem& system, std::size_t i,
                       std::span<const double> x, double h);

/// Variant with a per-coordinate step h_j = rel_step * max(1, |x_j|).
Vector fd_jacobian_row_scaled(const NonlinearSystem& system, std::size_t i,
                              std::span<const double> x, double rel_step);

namespace detail
{
void check_block_request(const NonlinearSystem& system, std::span<const std::size_t> rows,
                         std::span<const double> x);
void check_row_values(const SparseRow& row, std::size_t i);
} // namespace detail

template <typename Visitor>
void for_each_jacobian_row(const NonlinearSystem& system, std::span<const std::size_t> rows,
                           std::span<const double> x, Visitor&& visit)
{
    detail::check_block_request(system, rows, x);
    for (std::size_t pos = 0; pos < rows.size(); ++pos)
    {
        const SparseRow row = system.gradient(rows[pos], x);
        detail::check_row_values(row, rows[pos]);
        visit(pos, rows[pos], row);
    }
}

} // namespace nlk

#endif // NLK_SYSTEM_HPP
