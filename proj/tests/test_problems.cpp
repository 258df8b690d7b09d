#include "support/check.hpp"
#include "support/oracles.hpp"

#include "nlk/problems.hpp"
#include "nlk/solvers.hpp"

#include <cmath>

using namespace nlk;

TEST_CASE("H-equation nodes are midpoints")
{
    CHECK(h_equation_nodes(4) == Vector{0.125, 0.375, 0.625, 0.875});
}

TEST_CASE("starting points")
{
    CHECK(make_problem({.kind = ProblemKind::ModifiedRosenbrock, .m = 4}).x0 == Vector{-1.8, -1, -1.8, -1});
    CHECK(make_problem({.kind = ProblemKind::ExtendedCraggLevy, .m = 8}).x0 == Vector{1, 2, 2, 2, 1, 2, 2, 2});
    CHECK(make_problem({.kind = ProblemKind::ChandrasekharH, .m = 3}).x0 == Vector(3, 0.0));
    CHECK(make_problem({.kind = ProblemKind::AugmentedRosenbrock, .m = 4}).x0 == Vector{-1.2, 1, -1, 20});
    CHECK(make_problem({.kind = ProblemKind::ExtendedPowellBadlyScaled, .m = 4}).x0 == Vector{0, 1, 0, 1});
}

TEST_CASE("sizes must respect the component period")
{
    CHECK_ERROR(make_problem({.kind = ProblemKind::ModifiedRosenbrock, .m = 3}), ErrorCode::InvalidDimension);
    CHECK_ERROR(make_problem({.kind = ProblemKind::ExtendedCraggLevy, .m = 6}), ErrorCode::InvalidDimension);
    CHECK_ERROR(make_problem({.kind = ProblemKind::AugmentedRosenbrock, .m = 0}), ErrorCode::InvalidDimension);
    CHECK_NOTHROW(make_problem({.kind = ProblemKind::ChandrasekharH, .m = 7}));

    CHECK_ERROR(make_problem({.kind = ProblemKind::ChandrasekharH, .m = 4001}), ErrorCode::InvalidDimension);
    CHECK_NOTHROW(make_problem({.kind = ProblemKind::ChandrasekharH, .m = 4001, .allow_large = true}));
    CHECK_ERROR(make_problem({.kind = ProblemKind::ChandrasekharH, .m = 4, .c = 1.5}), ErrorCode::InvalidArgument);
}

TEST_CASE("names")
{
    for (auto kind : {ProblemKind::ModifiedRosenbrock, ProblemKind::ExtendedCraggLevy, ProblemKind::ChandrasekharH,
                      ProblemKind::AugmentedRosenbrock, ProblemKind::ExtendedPowellBadlyScaled})
        CHECK(parse_problem_kind(to_string(kind)) == kind);
    CHECK(parse_problem_kind("Extended-Powell") == ProblemKind::ExtendedPowellBadlyScaled);
    CHECK_FALSE(parse_problem_kind("rosenbrock").has_value());
    CHECK(period(ProblemKind::ExtendedCraggLevy) == 4);
    CHECK(default_theta(ProblemKind::ChandrasekharH) == 0.1);
    CHECK(default_theta(ProblemKind::ModifiedRosenbrock) == 0.5);
}

TEST_CASE("H-equation rows are dense")
{
    const Problem p = make_problem({.kind = ProblemKind::ChandrasekharH, .m = 12});
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(jacobian_row(*p.system, i, p.x0).nnz() == 12);
}

TEST_CASE("augmented Rosenbrock coupling coefficient")
{
    const Problem verbatim = make_problem({.kind = ProblemKind::AugmentedRosenbrock, .m = 4});
    const Problem classical =
        make_problem({.kind = ProblemKind::AugmentedRosenbrock, .m = 4, .rosenbrock_coupling = 1.0});
    CHECK(residual(*verbatim.system, verbatim.x0)[1] == 1.0 - 4.0 * -1.2);
    CHECK(residual(*classical.system, classical.x0)[1] == 1.0 + 1.2);
    CHECK(jacobian_row(*classical.system, 1, classical.x0).values == Vector{-1.0});
}

TEST_CASE("linear problems")
{
    SUBCASE("identity")
    {
        const DenseMatrix a{3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}};
        const LinearProblem lin = make_linear_problem(a, Vector{1, 2, 3});
        CHECK(lin.x_star == Vector{1, 2, 3});
        CHECK(residual(*lin.system, lin.x_star) == Vector(3, 0.0));
    }
    SUBCASE("minimum norm for an underdetermined row")
    {
        const LinearProblem lin = make_linear_problem(DenseMatrix{1, 2, {1, 1}}, Vector{2});
        CHECK(lin.x_star[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(lin.x_star[1] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("random consistent 5 x 8")
    {
        Rng rng(8);
        const DenseMatrix a = oracle::random_matrix(rng, 5, 8, 5);
        const Vector b = oracle::multiply(a, oracle::random_vector(rng, 8));
        const LinearProblem lin = make_linear_problem(a, b);
        CHECK(norm2(residual(*lin.system, lin.x_star)) <= 1e-10);
        for (const Vector& z : oracle::null_space(a))
            CHECK(std::abs(dot(z, lin.x_star)) <= 1e-10 * norm2(lin.x_star));
    }
    SUBCASE("inconsistent right-hand side")
    {
        const DenseMatrix a{3, 2, {1, 0, 0, 2, 0, 0}};
        CHECK_ERROR(make_linear_problem(a, Vector{1, 2, 5}), ErrorCode::InconsistentSystem);
        CHECK_ERROR(make_linear_problem(a, Vector{1, 2}), ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("every benchmark problem has a reachable root")
{
    for (auto kind : {ProblemKind::ModifiedRosenbrock, ProblemKind::ExtendedCraggLevy, ProblemKind::ChandrasekharH,
                      ProblemKind::AugmentedRosenbrock, ProblemKind::ExtendedPowellBadlyScaled})
    {
        CAPTURE(to_string(kind));
        const Problem p = make_problem({.kind = kind, .m = 100});
        MethodConfig config = default_config(Method::ABNKAm);
        config.theta = default_theta(kind);
        const StoppingConfig stop;
        const SolveReport report = solve(*p.system, p.x0, config, stop);
        REQUIRE(report.status == SolveStatus::Converged);
        CHECK(norm2(residual(*p.system, report.x)) <= stop.tau_a + stop.tau_r * report.initial_residual_norm);
    }
}
