#include "nlk/types.hpp"

#include <cmath>

namespace nlk
{

const char* to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InconsistentSystem: return "InconsistentSystem";
    case ErrorCode::ZeroResidual: return "ZeroResidual";
    case ErrorCode::ZeroGradientRow: return "ZeroGradientRow";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::LsqrNoProgress: return "LsqrNoProgress";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ParseFailure: return "ParseFailure";
    }
    return "Unknown";
}

double SparseRow::squared_norm() const noexcept
{
    double s = 0.0;
    for (double v : values)
        s += v * v;
    return s;
}

double SparseRow::dot(std::span<const double> x) const noexcept
{
    double s = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k)
        s += values[k] * x[indices[k]];
    return s;
}

void SparseRow::axpy_into(double a, std::span<double> y) const noexcept
{
    for (std::size_t k = 0; k < indices.size(); ++k)
        y[indices[k]] += a * values[k];
}

Vector SparseRow::to_dense() const
{
    Vector out(dim, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k)
        out[indices[k]] = values[k];
    return out;
}

void validate(const SparseRow& row)
{
    if (row.indices.size() != row.values.size())
        throw Error(ErrorCode::InvalidArgument, "sparse row index/value length mismatch");
    for (std::size_t k = 0; k < row.indices.size(); ++k)
    {
        if (row.indices[k] >= row.dim)
            throw Error(ErrorCode::InvalidArgument, "sparse row index outside ambient dimension");
        if (k > 0 && row.indices[k] <= row.indices[k - 1])
            throw Error(ErrorCode::InvalidArgument, "sparse row indices not strictly increasing");
        if (!std::isfinite(row.values[k]))
            throw Error(ErrorCode::NonFiniteValue, "sparse row value is not finite");
    }
}

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double squared_norm(std::span<const double> a) noexcept
{
    return dot(a, a);
}

double norm2(std::span<const double> a) noexcept
{
    return std::sqrt(squared_norm(a));
}

bool all_finite(std::span<const double> a) noexcept
{
    for (double v : a)
        if (!std::isfinite(v))
            return false;
    return true;
}

} // namespace nlk
