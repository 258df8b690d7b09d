#ifndef NLK_PROBLEMS_HPP
#define NLK_PROBLEMS_HPP

#include "nlk/system.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace nlk
{

enum class ProblemKind
{
    ModifiedRosenbrock,
    ExtendedCraggLevy,
    ChandrasekharH,
    AugmentedRosenbrock,
    ExtendedPowellBadlyScaled,
};

std::string_view to_string(ProblemKind kind) noexcept;
std::optional<ProblemKind> parse_problem_kind(std::string_view name) noexcept;

/// Component period: m must be a positive multiple of this.
std::size_t period(ProblemKind kind) noexcept;

/// Greedy selectivity used when a run does not set one: 0.1 for the
/// H-equation, 0.5 elsewhere.
double default_theta(ProblemKind kind) noexcept;

struct ProblemSpec
{
    ProblemKind kind = ProblemKind::ModifiedRosenbrock;
    std::size_t m = 0;
    double c = 0.9; ///< H-equation albedo
    /// Coefficient of x_{k-1} in the mod(k,4)=2 augmented Rosenbrock
    /// component 1 - coupling * x_{k-1}. The classical problem uses 1.
    double rosenbrock_coupling = 4.0;
    /// Dense H-equation instances beyond this size are refused unless
    /// allow_large is set.
    std::size_t dense_cap = 4000;
    bool allow_large = false;
};

struct Problem
{
    std::shared_ptr<const NonlinearSystem> system;
    Vector x0;
};

/// Builds a benchmark system together with its standard starting point.
/// Throws InvalidDimension when m is not a positive multiple of the period.
Problem make_problem(const ProblemSpec& spec);

/// Row-major dense matrix used by the linear test systems.
struct DenseMatrix
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
};

struct LinearProblem
{
    std::shared_ptr<const NonlinearSystem> system;
    Vector x_star; ///< minimum-norm solution of A x = b
};

/// Wraps F(x) = A x - b. Throws InconsistentSystem when b is not in the
/// range of A (residual of the minimum-norm least-squares solution above
/// 1e-10 relative to max(1, |b|)).
LinearProblem make_linear_problem(const DenseMatrix& a, const Vector& b);

/// Midpoint-rule nodes t_i = (i + 1/2) / m, 0-based.
Vector h_equation_nodes(std::size_t m);

} // namespace nlk

#endif // NLK_PROBLEMS_HPP
