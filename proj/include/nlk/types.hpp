#ifndef NLK_TYPES_HPP
#define NLK_TYPES_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlk
{

using Vector = std::vector<double>;

enum class ErrorCode
{
    DimensionMismatch,
    NonFiniteValue,
    IndexOutOfRange,
    InvalidDimension,
    InvalidArgument,
    InconsistentSystem,
    ZeroResidual,
    ZeroGradientRow,
    ZeroDirection,
    LsqrNoProgress,
    MissingBaseline,
    IoFailure,
    ParseFailure,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type used throughout the library. The code identifies the
/// failure class so callers (the solve loop, the suite runner) can map it
/// onto a run status without string matching.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// One Jacobian row stored as (column, value) pairs. Indices are strictly
/// increasing and lie in [0, dim).
struct SparseRow
{
    std::vector<std::size_t> indices;
    std::vector<double> values;
    std::size_t dim = 0;

    std::size_t nnz() const noexcept { return indices.size(); }
    double squared_norm() const noexcept;
    double dot(std::span<const double> x) const noexcept;
    /// y += a * row
    void axpy_into(double a, std::span<double> y) const noexcept;
    Vector to_dense() const;
};

/// Throws InvalidArgument when the row violates its invariants.
void validate(const SparseRow& row);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_norm(std::span<const double> a) noexcept;
double norm2(std::span<const double> a) noexcept;
bool all_finite(std::span<const double> a) noexcept;

} // namespace nlk

#endif // NLK_TYPES_HPP
