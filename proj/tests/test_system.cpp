#include "support/check.hpp"
#include "support/oracles.hpp"

#include "nlk/problems.hpp"
#include "nlk/system.hpp"

#include <cmath>

using namespace nlk;

namespace
{

// x^2 - 1 and x * y, without component()/gradient_block() overrides.
class Toy final : public NonlinearSystem
{
public:
    std::size_t equations() const noexcept override { return 2; }
    std::size_t unknowns() const noexcept override { return 2; }
    void evaluate(std::span<const double> x, std::span<double> out) const override
    {
        out[0] = x[0] * x[0] - 1.0;
        out[1] = x[0] * x[1];
    }
    SparseRow gradient(std::size_t i, std::span<const double> x) const override
    {
        if (i == 0)
            return {{0}, {2.0 * x[0]}, 2};
        return {{0, 1}, {x[1], x[0]}, 2};
    }
};

Problem build(ProblemKind kind, std::size_t m)
{
    return make_problem({.kind = kind, .m = m});
}

} // namespace

TEST_CASE("residual of the H-equation at zero is -1 everywhere")
{
    const Problem p = build(ProblemKind::ChandrasekharH, 4);
    CHECK(residual(*p.system, Vector(4, 0.0)) == Vector(4, -1.0));
}

TEST_CASE("residual of modified Rosenbrock at the start point")
{
    const Problem p = build(ProblemKind::ModifiedRosenbrock, 2);
    const Vector r = residual(*p.system, Vector{-1.8, -1.0});
    // 40-digit evaluation of the component formulas
    CHECK(r[0] == doctest::Approx(-0.5881489350995122104).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(-42.4).epsilon(1e-15));
}

TEST_CASE("residual vanishes at a known root")
{
    const double a = std::log(0.73 / 0.27);
    const Problem p = build(ProblemKind::ModifiedRosenbrock, 4);
    for (double v : residual(*p.system, Vector{a, a * a, a, a * a}))
        CHECK(std::abs(v) < 1e-14);

    const Problem q = build(ProblemKind::AugmentedRosenbrock, 4);
    const Vector root{0.25, 0.0625, 0.0, 0.0};
    CHECK(residual(*q.system, root) == Vector(4, 0.0));
}

TEST_CASE("residual rejects bad points")
{
    const Problem p = build(ProblemKind::ModifiedRosenbrock, 4);
    CHECK_ERROR(residual(*p.system, Vector(3, 0.0)), ErrorCode::DimensionMismatch);
    CHECK_ERROR(residual(*p.system, Vector{0, 0, std::nan(""), 0}), ErrorCode::NonFiniteValue);

    const Problem c = build(ProblemKind::ExtendedCraggLevy, 4);
    CHECK_ERROR(residual(*c.system, Vector{800, 0, 0, 0}), ErrorCode::NonFiniteValue);
    CHECK_ERROR(jacobian_row(*c.system, 0, Vector{800, 0, 0, 0}), ErrorCode::NonFiniteValue);
}

TEST_CASE("residual is pure")
{
    Rng rng(7);
    const Problem p = build(ProblemKind::ChandrasekharH, 16);
    const Vector x = oracle::interior_point(ProblemKind::ChandrasekharH, 16, rng);
    CHECK(residual(*p.system, x) == residual(*p.system, x));
    const SparseRow a = jacobian_row(*p.system, 3, x);
    const SparseRow b = jacobian_row(*p.system, 3, x);
    CHECK(a.indices == b.indices);
    CHECK(a.values == b.values);
}

TEST_CASE("jacobian rows follow the analytic stencils")
{
    SUBCASE("modified Rosenbrock even row")
    {
        const Problem p = build(ProblemKind::ModifiedRosenbrock, 4);
        const SparseRow row = jacobian_row(*p.system, 3, Vector{0.1, 0.2, 0.3, 0.4});
        CHECK(row.indices == std::vector<std::size_t>{2, 3});
        CHECK(row.values == Vector{-20.0 * 0.3, 10.0});
    }
    SUBCASE("augmented Rosenbrock identity row")
    {
        const Problem p = build(ProblemKind::AugmentedRosenbrock, 8);
        const SparseRow row = jacobian_row(*p.system, 7, p.x0);
        CHECK(row.indices == std::vector<std::size_t>{7});
        CHECK(row.values == Vector{1.0});
    }
    SUBCASE("H-equation at zero")
    {
        constexpr std::size_t m = 6;
        const double c = 0.9;
        const Problem p = build(ProblemKind::ChandrasekharH, m);
        const SparseRow row = jacobian_row(*p.system, 2, Vector(m, 0.0));
        REQUIRE(row.nnz() == m);
        const double ti = (2 + 0.5) / m;
        for (std::size_t j = 0; j < m; ++j)
        {
            const double tj = (j + 0.5) / m;
            const double expected = (j == 2 ? 1.0 : 0.0) - c / (2.0 * m) * ti / (ti + tj);
            CHECK(row.values[j] == doctest::Approx(expected).epsilon(1e-15));
        }
    }
    SUBCASE("row index out of range")
    {
        const Problem p = build(ProblemKind::ModifiedRosenbrock, 4);
        CHECK_ERROR(jacobian_row(*p.system, 4, p.x0), ErrorCode::IndexOutOfRange);
    }
}

TEST_CASE("jacobian blocks stack rows in order")
{
    const Problem p = build(ProblemKind::ModifiedRosenbrock, 4);
    const Vector x{0.3, -0.7, 1.1, 2.0};
    const std::vector<std::size_t> rows{2, 0};
    const auto block = jacobian_block(*p.system, rows, x);
    REQUIRE(block.size() == 2);
    for (std::size_t k = 0; k < rows.size(); ++k)
    {
        const SparseRow single = jacobian_row(*p.system, rows[k], x);
        CHECK(block[k].indices == single.indices);
        CHECK(block[k].values == single.values);
    }
    CHECK_ERROR(jacobian_block(*p.system, std::vector<std::size_t>{}, x), ErrorCode::InvalidArgument);

    const DenseMatrix a{3, 3, {2, 0, 1, 0, 3, 0, 1, 1, 1}};
    const LinearProblem lin = make_linear_problem(a, Vector{3, 3, 3});
    const auto all = jacobian_block(*lin.system, std::vector<std::size_t>{0, 1, 2}, Vector(3, 5.0));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(all[i].to_dense() == Vector{a(i, 0), a(i, 1), a(i, 2)});
}

TEST_CASE("default component and block evaluators")
{
    const Toy toy;
    const Vector x{3.0, 2.0};
    CHECK(toy.component(0, x) == 8.0);
    CHECK(toy.component(1, x) == 6.0);
    const auto block = toy.gradient_block(std::vector<std::size_t>{1, 0}, x);
    CHECK(block[0].values == Vector{2.0, 3.0});
    CHECK(block[1].values == Vector{6.0});
}

TEST_CASE("finite differences")
{
    SUBCASE("exact for affine maps")
    {
        const DenseMatrix a{2, 3, {1, -2, 0.5, 4, 0, -1}};
        const LinearProblem lin = make_linear_problem(a, Vector{1, 1});
        for (double h : {1e-3, 1e-1, 1.0})
        {
            const Vector fd = fd_jacobian_row(*lin.system, 1, Vector{0.2, 0.4, -3.0}, h);
            CHECK(fd[0] == doctest::Approx(4.0).epsilon(1e-12));
            CHECK(std::abs(fd[1]) < 1e-12);
            CHECK(fd[2] == doctest::Approx(-1.0).epsilon(1e-12));
        }
    }
    SUBCASE("badly scaled Powell row")
    {
        const Problem p = build(ProblemKind::ExtendedPowellBadlyScaled, 2);
        const Vector x{1e-4, 1.0};
        const Vector analytic = jacobian_row(*p.system, 0, x).to_dense();
        CHECK(analytic == Vector{10000.0, 1.0});
        const Vector fd = fd_jacobian_row_scaled(*p.system, 0, x, 1e-6);
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(std::abs(fd[j] - analytic[j]) <= 1e-6 * std::abs(analytic[j]));
    }
    SUBCASE("dense H-equation row")
    {
        const Problem p = build(ProblemKind::ChandrasekharH, 8);
        const Vector u(8, 0.5);
        const Vector analytic = jacobian_row(*p.system, 0, u).to_dense();
        const Vector fd = fd_jacobian_row_scaled(*p.system, 0, u, 1e-6);
        for (std::size_t j = 0; j < 8; ++j)
            CHECK(std::abs(fd[j] - analytic[j]) <= 1e-5 * std::abs(analytic[j]));
    }
    SUBCASE("step must be positive")
    {
        const Problem p = build(ProblemKind::ModifiedRosenbrock, 2);
        CHECK_ERROR(fd_jacobian_row(*p.system, 0, p.x0, 0.0), ErrorCode::InvalidArgument);
    }
}

TEST_CASE("analytic rows agree with finite differences on every problem")
{
    const auto result = oracle::check_fd_consistency(20, 11);
    INFO(result.detail);
    CHECK(result.pass);
    CHECK(result.cases > 0);
}
