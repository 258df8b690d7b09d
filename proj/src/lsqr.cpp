#include "nlk/lsqr.hpp"

#include <cmath>

namespace nlk
{

namespace
{

void scale(std::span<double> v, double a) noexcept
{
    for (double& x : v)
        x *= a;
}

void check_finite(double v, const char* what)
{
    if (!std::isfinite(v))
        throw Error(ErrorCode::NonFiniteValue, std::string("LSQR breakdown in ") + what);
}

} // namespace

LsqrOutcome lsqr_solve(const LinearOperator& a, std::span<const double> b, const LsqrConfig& config)
{
    if (b.size() != a.rows)
        throw Error(ErrorCode::DimensionMismatch, "LSQR right-hand side does not match operator rows");
    if (!(config.atol > 0.0) || !(config.btol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "LSQR tolerances must be positive");

    const std::size_t p = a.rows;
    const std::size_t n = a.cols;
    const std::size_t max_inner = config.max_inner > 0 ? config.max_inner : 2 * (p + n);

    LsqrOutcome out;
    out.solution.assign(n, 0.0);
    Vector& x = out.solution;

    Vector u(b.begin(), b.end());
    Vector v(n, 0.0);
    Vector w(n, 0.0);
    Vector tmp_u(p), tmp_v(n);

    double beta = norm2(u);
    check_finite(beta, "initial norm");
    const double bnorm = beta;
    if (beta == 0.0)
        return out;

    scale(u, 1.0 / beta);
    a.apply_adjoint(u, v);
    double alpha = norm2(v);
    check_finite(alpha, "initial adjoint");
    if (alpha == 0.0)
    {
        // b is orthogonal to range(A); x = 0 is the least-squares solution.
        out.relative_residual = 1.0;
        return out;
    }
    scale(v, 1.0 / alpha);
    w = v;

    double rhobar = alpha;
    double phibar = beta;
    double anorm_sq = 0.0;
    double xnorm = 0.0;

    while (out.iterations < max_inner)
    {
        ++out.iterations;

        // beta u = A v - alpha u
        a.apply(v, tmp_u);
        for (std::size_t i = 0; i < p; ++i)
            u[i] = tmp_u[i] - alpha * u[i];
        beta = norm2(u);
        check_finite(beta, "forward step");
        anorm_sq += alpha * alpha + beta * beta;

        if (beta > 0.0)
        {
            scale(u, 1.0 / beta);
            // alpha v = A^T u - beta v
            a.apply_adjoint(u, tmp_v);
            for (std::size_t j = 0; j < n; ++j)
                v[j] = tmp_v[j] - beta * v[j];
            alpha = norm2(v);
            check_finite(alpha, "adjoint step");
            if (alpha > 0.0)
                scale(v, 1.0 / alpha);
        }
        else
        {
            alpha = 0.0;
        }

        const double rho = std::hypot(rhobar, beta);
        const double cs = rhobar / rho;
        const double sn = beta / rho;
        const double theta = sn * alpha;
        rhobar = -cs * alpha;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        const double t1 = phi / rho;
        const double t2 = -theta / rho;
        for (std::size_t j = 0; j < n; ++j)
        {
            x[j] += t1 * w[j];
            w[j] = v[j] + t2 * w[j];
        }
        check_finite(t1, "solution update");

        xnorm = norm2(x);
        const double anorm = std::sqrt(anorm_sq);
        const double rnorm = phibar;
        const double arnorm = phibar * alpha * std::abs(cs);
        out.relative_residual = rnorm / bnorm;

        if (rnorm <= config.btol * bnorm + config.atol * anorm * xnorm)
            return out;
        if (arnorm <= config.atol * anorm * rnorm)
            return out;
        if (alpha == 0.0 || beta == 0.0)
            return out; // Krylov space exhausted: x is exact in exact arithmetic
    }

    out.stop = LsqrStop::MaxInner;
    return out;
}

} // namespace nlk
