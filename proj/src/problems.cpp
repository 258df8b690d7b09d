#include "nlk/problems.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace nlk
{

namespace
{

// Component formulas are written with the 1-based index k = i + 1 so the
// period tests read like mod(k, p). Column k - 1 in 1-based terms is i - 1.

SparseRow make_row(std::size_t dim, std::initializer_list<std::pair<std::size_t, double>> entries)
{
    SparseRow row;
    row.dim = dim;
    row.indices.reserve(entries.size());
    row.values.reserve(entries.size());
    for (const auto& [j, v] : entries)
    {
        row.indices.push_back(j);
        row.values.push_back(v);
    }
    return row;
}

class ModifiedRosenbrock final : public NonlinearSystem
{
public:
    explicit ModifiedRosenbrock(std::size_t m) : m_(m) {}

    std::size_t equations() const noexcept override { return m_; }
    std::size_t unknowns() const noexcept override { return m_; }

    void evaluate(std::span<const double> x, std::span<double> out) const override
    {
        for (std::size_t i = 0; i < m_; ++i)
            out[i] = component(i, x);
    }

    double component(std::size_t i, std::span<const double> x) const override
    {
        if ((i + 1) % 2 == 1)
            return 1.0 / (1.0 + std::exp(-x[i])) - 0.73;
        return 10.0 * (x[i] - x[i - 1] * x[i - 1]);
    }

    SparseRow gradient(std::size_t i, std::span<const double> x) const override
    {
        if ((i + 1) % 2 == 1)
        {
            const double s = 1.0 / (1.0 + std::exp(-x[i]));
            return make_row(m_, {{i, s * (1.0 - s)}});
        }
        return make_row(m_, {{i - 1, -20.0 * x[i - 1]}, {i, 10.0}});
    }

private:
    std::size_t m_;
};

class ExtendedCraggLevy final : public NonlinearSystem
{
public:
    explicit ExtendedCraggLevy(std::size_t m) : m_(m) {}

    std::size_t equations() const noexcept override { return m_; }
    std::size_t unknowns() const noexcept override { return m_; }

    void evaluate(std::span<const double> x, std::span<double> out) const override
    {
        for (std::size_t i = 0; i < m_; ++i)
            out[i] = component(i, x);
    }

    double component(std::size_t i, std::span<const double> x) const override
    {
        switch ((i + 1) % 4)
        {
        case 1: {
            const double u = std::exp(x[i]) - x[i + 1];
            return u * u;
        }
        case 2: {
            const double u = x[i] - x[i + 1];
            return 10.0 * u * u * u;
        }
        case 3: {
            const double t = std::tan(x[i] - x[i + 1]);
            return t * t;
        }
        default: return x[i] - 1.0;
        }
    }

    SparseRow gradient(std::size_t i, std::span<const double> x) const override
    {
        switch ((i + 1) % 4)
        {
        case 1: {
            const double e = std::exp(x[i]);
            const double u = e - x[i + 1];
            return make_row(m_, {{i, 2.0 * u * e}, {i + 1, -2.0 * u}});
        }
        case 2: {
            const double u = x[i] - x[i + 1];
            const double g = 30.0 * u * u;
            return make_row(m_, {{i, g}, {i + 1, -g}});
        }
        case 3: {
            const double u = x[i] - x[i + 1];
            const double t = std::tan(u);
            const double g = 2.0 * t * (1.0 + t * t);
            return make_row(m_, {{i, g}, {i + 1, -g}});
        }
        default: return make_row(m_, {{i, 1.0}});
        }
    }

private:
    std::size_t m_;
};

class ChandrasekharH final : public NonlinearSystem
{
public:
    ChandrasekharH(std::size_t m, double c) : m_(m), scale_(c / (2.0 * static_cast<double>(m))), t_(h_equation_nodes(m)) {}

    std::size_t equations() const noexcept override { return m_; }
    std::size_t unknowns() const noexcept override { return m_; }

    void evaluate(std::span<const double> u, std::span<double> out) const override
    {
        for (std::size_t i = 0; i < m_; ++i)
            out[i] = u[i] - 1.0 / denominator(i, u);
    }

    double component(std::size_t i, std::span<const double> u) const override
    {
        return u[i] - 1.0 / denominator(i, u);
    }

    SparseRow gradient(std::size_t i, std::span<const double> u) const override
    {
        const double a = denominator(i, u);
        const double f = scale_ / (a * a);
        SparseRow row;
        row.dim = m_;
        row.indices.resize(m_);
        row.values.resize(m_);
        const double ti = t_[i];
        for (std::size_t j = 0; j < m_; ++j)
        {
            row.indices[j] = j;
            row.values[j] = (i == j ? 1.0 : 0.0) - f * ti / (ti + t_[j]);
        }
        return row;
    }

private:
    // A_i = 1 - (c / 2m) sum_j t_i u_j / (t_i + t_j)
    double denominator(std::size_t i, std::span<const double> u) const
    {
        const double ti = t_[i];
        double s = 0.0;
        for (std::size_t j = 0; j < m_; ++j)
            s += ti * u[j] / (ti + t_[j]);
        return 1.0 - scale_ * s;
    }

    std::size_t m_;
    double scale_;
    Vector t_;
};

class AugmentedRosenbrock final : public NonlinearSystem
{
public:
    AugmentedRosenbrock(std::size_t m, double coupling) : m_(m), coupling_(coupling) {}

    std::size_t equations() const noexcept override { return m_; }
    std::size_t unknowns() const noexcept override { return m_; }

    void evaluate(std::span<const double> x, std::span<double> out) const override
    {
        for (std::size_t i = 0; i < m_; ++i)
            out[i] = component(i, x);
    }

    double component(std::size_t i, std::span<const double> x) const override
    {
        switch ((i + 1) % 4)
        {
        case 1: return 100.0 * (x[i + 1] - x[i] * x[i]);
        case 2: return 1.0 - coupling_ * x[i - 1];
        case 3: return 1.25 * x[i] - 0.25 * x[i] * x[i] * x[i];
        default: return x[i];
        }
    }

    SparseRow gradient(std::size_t i, std::span<const double> x) const override
    {
        switch ((i + 1) % 4)
        {
        case 1: return make_row(m_, {{i, -200.0 * x[i]}, {i + 1, 100.0}});
        case 2: return make_row(m_, {{i - 1, -coupling_}});
        case 3: return make_row(m_, {{i, 1.25 - 0.75 * x[i] * x[i]}});
        default: return make_row(m_, {{i, 1.0}});
        }
    }

private:
    std::size_t m_;
    double coupling_;
};

class ExtendedPowellBadlyScaled final : public NonlinearSystem
{
public:
    explicit ExtendedPowellBadlyScaled(std::size_t m) : m_(m) {}

    std::size_t equations() const noexcept override { return m_; }
    std::size_t unknowns() const noexcept override { return m_; }

    void evaluate(std::span<const double> x, std::span<double> out) const override
    {
        for (std::size_t i = 0; i < m_; ++i)
            out[i] = component(i, x);
    }

    double component(std::size_t i, std::span<const double> x) const override
    {
        if ((i + 1) % 2 == 1)
            return 10000.0 * x[i] * x[i + 1] - 1.0;
        return std::exp(-x[i - 1]) + std::exp(-x[i]) - 1.0001;
    }

    SparseRow gradient(std::size_t i, std::span<const double> x) const override
    {
        if ((i + 1) % 2 == 1)
            return make_row(m_, {{i, 10000.0 * x[i + 1]}, {i + 1, 10000.0 * x[i]}});
        return make_row(m_, {{i - 1, -std::exp(-x[i - 1])}, {i, -std::exp(-x[i])}});
    }

private:
    std::size_t m_;
};

class LinearSystem final : public NonlinearSystem
{
public:
    LinearSystem(DenseMatrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {}

    std::size_t equations() const noexcept override { return a_.rows; }
    std::size_t unknowns() const noexcept override { return a_.cols; }

    void evaluate(std::span<const double> x, std::span<double> out) const override
    {
        for (std::size_t i = 0; i < a_.rows; ++i)
            out[i] = component(i, x);
    }

    double component(std::size_t i, std::span<const double> x) const override
    {
        double s = 0.0;
        for (std::size_t j = 0; j < a_.cols; ++j)
            s += a_(i, j) * x[j];
        return s - b_[i];
    }

    SparseRow gradient(std::size_t i, std::span<const double>) const override
    {
        SparseRow row;
        row.dim = a_.cols;
        row.indices.resize(a_.cols);
        row.values.resize(a_.cols);
        for (std::size_t j = 0; j < a_.cols; ++j)
        {
            row.indices[j] = j;
            row.values[j] = a_(i, j);
        }
        return row;
    }

private:
    DenseMatrix a_;
    Vector b_;
};

std::string normalize_name(std::string_view name)
{
    std::string out;
    out.reserve(name.size());
    for (char ch : name)
        out.push_back(ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return out;
}

} // namespace

std::string_view to_string(ProblemKind kind) noexcept
{
    switch (kind)
    {
    case ProblemKind::ModifiedRosenbrock: return "modified_rosenbrock";
    case ProblemKind::ExtendedCraggLevy: return "extended_cragg_levy";
    case ProblemKind::ChandrasekharH: return "chandrasekhar_h";
    case ProblemKind::AugmentedRosenbrock: return "augmented_rosenbrock";
    case ProblemKind::ExtendedPowellBadlyScaled: return "extended_powell";
    }
    return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view name) noexcept
{
    const std::string key = normalize_name(name);
    for (auto kind : {ProblemKind::ModifiedRosenbrock, ProblemKind::ExtendedCraggLevy,
                      ProblemKind::ChandrasekharH, ProblemKind::AugmentedRosenbrock,
                      ProblemKind::ExtendedPowellBadlyScaled})
        if (key == to_string(kind))
            return kind;
    return std::nullopt;
}

double default_theta(ProblemKind kind) noexcept
{
    return kind == ProblemKind::ChandrasekharH ? 0.1 : 0.5;
}

std::size_t period(ProblemKind kind) noexcept
{
    switch (kind)
    {
    case ProblemKind::ModifiedRosenbrock: return 2;
    case ProblemKind::ExtendedCraggLevy: return 4;
    case ProblemKind::ChandrasekharH: return 1;
    case ProblemKind::AugmentedRosenbrock: return 4;
    case ProblemKind::ExtendedPowellBadlyScaled: return 2;
    }
    return 1;
}

Vector h_equation_nodes(std::size_t m)
{
    Vector t(m);
    for (std::size_t i = 0; i < m; ++i)
        t[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    return t;
}

Problem make_problem(const ProblemSpec& spec)
{
    const std::size_t p = period(spec.kind);
    if (spec.m == 0 || spec.m % p != 0)
        throw Error(ErrorCode::InvalidDimension,
                    std::string(to_string(spec.kind)) + " needs m to be a positive multiple of " +
                        std::to_string(p) + ", got " + std::to_string(spec.m));

    const std::size_t m = spec.m;
    Problem problem;
    problem.x0.resize(m);
    switch (spec.kind)
    {
    case ProblemKind::ModifiedRosenbrock:
        problem.system = std::make_shared<ModifiedRosenbrock>(m);
        for (std::size_t i = 0; i < m; ++i)
            problem.x0[i] = (i + 1) % 2 == 1 ? -1.8 : -1.0;
        break;
    case ProblemKind::ExtendedCraggLevy:
        problem.system = std::make_shared<ExtendedCraggLevy>(m);
        for (std::size_t i = 0; i < m; ++i)
            problem.x0[i] = (i + 1) % 4 == 1 ? 1.0 : 2.0;
        break;
    case ProblemKind::ChandrasekharH:
        if (m > spec.dense_cap && !spec.allow_large)
            throw Error(ErrorCode::InvalidDimension,
                        "chandrasekhar_h with m = " + std::to_string(m) +
                            " exceeds the dense cap of " + std::to_string(spec.dense_cap) +
                            " (set allow_large to override)");
        if (!(spec.c >= 0.0 && spec.c <= 1.0))
            throw Error(ErrorCode::InvalidArgument, "H-equation parameter c must lie in [0, 1]");
        problem.system = std::make_shared<ChandrasekharH>(m, spec.c);
        std::fill(problem.x0.begin(), problem.x0.end(), 0.0);
        break;
    case ProblemKind::AugmentedRosenbrock: {
        problem.system = std::make_shared<AugmentedRosenbrock>(m, spec.rosenbrock_coupling);
        constexpr double pattern[4] = {20.0, -1.2, 1.0, -1.0}; // indexed by mod(k, 4)
        for (std::size_t i = 0; i < m; ++i)
            problem.x0[i] = pattern[(i + 1) % 4];
        break;
    }
    case ProblemKind::ExtendedPowellBadlyScaled:
        problem.system = std::make_shared<ExtendedPowellBadlyScaled>(m);
        for (std::size_t i = 0; i < m; ++i)
            problem.x0[i] = (i + 1) % 2 == 1 ? 0.0 : 1.0;
        break;
    }
    return problem;
}

LinearProblem make_linear_problem(const DenseMatrix& a, const Vector& b)
{
    if (a.rows == 0 || a.cols == 0 || a.data.size() != a.rows * a.cols)
        throw Error(ErrorCode::InvalidDimension, "malformed dense matrix");
    if (b.size() != a.rows)
        throw Error(ErrorCode::DimensionMismatch, "right-hand side length does not match rows");
    if (!all_finite(a.data) || !all_finite(b))
        throw Error(ErrorCode::NonFiniteValue, "linear system has non-finite entries");

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajor> A(a.data.data(), static_cast<Eigen::Index>(a.rows),
                                       static_cast<Eigen::Index>(a.cols));
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const Eigen::VectorXd x = cod.solve(rhs);
    const double misfit = (A * x - rhs).norm();
    if (misfit > 1e-10 * std::max(1.0, rhs.norm()))
        throw Error(ErrorCode::InconsistentSystem,
                    "right-hand side is not in the range of A (misfit " + std::to_string(misfit) + ")");

    LinearProblem out;
    out.system = std::make_shared<LinearSystem>(a, b);
    out.x_star.assign(x.data(), x.data() + x.size());
    return out;
}

} // namespace nlk
