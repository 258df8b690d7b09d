#ifndef NLK_LSQR_HPP
#define NLK_LSQR_HPP

#include "nlk/types.hpp"

#include <functional>
#include <span>

namespace nlk
{

/// A p x n linear map given by its forward and adjoint actions.
/// Both callbacks overwrite their output.
struct LinearOperator
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::function<void(std::span<const double> v, std::span<double> out)> apply;
    std::function<void(std::span<const double> u, std::span<double> out)> apply_adjoint;
};

struct LsqrConfig
{
    double atol = 1e-10;
    double btol = 1e-10;
    /// 0 selects the default budget 2 * (rows + cols).
    std::size_t max_inner = 0;
};

enum class LsqrStop
{
    AtolBtolMet,
    MaxInner,
};

struct LsqrOutcome
{
    Vector solution;
    std::size_t iterations = 0;
    /// Estimate of |b - A x| / |b| (0 when b = 0).
    double relative_residual = 0.0;
    LsqrStop stop = LsqrStop::AtolBtolMet;
};

///
/// Solves min |A x - b| with the Golub-Kahan bidiagonalization recurrence,
/// starting from x = 0 so the iterates stay in range(A^T) and the limit is
/// the minimum-norm solution A^+ b. No damping.
///
/// Stops when either
///   |r| <= btol |b| + atol |A| |x|           (compatible systems), or
///   |A^T r| <= atol |A| |r|                   (least-squares systems),
/// with |A| the running Frobenius-norm estimate of the bidiagonal.
///
/// Throws NonFiniteValue if the recurrence produces a NaN or Inf.
///
LsqrOutcome lsqr_solve(const LinearOperator& a, std::span<const double> b, const LsqrConfig& config);

} // namespace nlk

#endif // NLK_LSQR_HPP
