#include "nlk/selection.hpp"

#include <cmath>

namespace nlk
{

namespace
{

void check_theta(double theta)
{
    if (!(theta > 0.0 && theta <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, 1]");
}

double max_square(std::span<const double> r)
{
    if (r.empty())
        throw Error(ErrorCode::InvalidDimension, "empty residual");
    double mx = 0.0;
    for (double v : r)
        mx = std::max(mx, v * v);
    if (mx == 0.0)
        throw Error(ErrorCode::ZeroResidual, "residual is identically zero");
    return mx;
}

IndexSet filter_at_least(std::span<const double> r, double threshold)
{
    IndexSet out;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] * r[i] >= threshold)
            out.push_back(i);
    return out;
}

} // namespace

IndexSet greedy_threshold_set(std::span<const double> r, double theta)
{
    check_theta(theta);
    const double mx = max_square(r);
    // theta == 1 must keep every tie with the maximum, so compare against the
    // exact product rather than a rescaled value.
    return filter_at_least(r, theta * mx);
}

IndexSet capped_set(std::span<const double> r, double theta)
{
    check_theta(theta);
    const double mx = max_square(r);
    const double mean = squared_norm(r) / static_cast<double>(r.size());
    // mean <= mx, but the rounded mean can exceed mx by an ulp when all
    // entries tie; clamp so the argmax always qualifies.
    const double threshold = std::min(mx, theta * mx + (1.0 - theta) * mean);
    return filter_at_least(r, threshold);
}

std::size_t max_residual_index(std::span<const double> r)
{
    max_square(r);
    std::size_t best = 0;
    double best_abs = std::abs(r[0]);
    for (std::size_t i = 1; i < r.size(); ++i)
    {
        const double a = std::abs(r[i]);
        if (a > best_abs)
        {
            best = i;
            best_abs = a;
        }
    }
    return best;
}

std::size_t sample_index(std::span<const double> r, const SelectionRule& rule, Rng& rng)
{
    max_square(r);
    switch (rule.kind)
    {
    case SelectionKind::MaxResidual: return max_residual_index(r);
    case SelectionKind::UniformRandom: {
        std::uniform_int_distribution<std::size_t> pick(0, r.size() - 1);
        return pick(rng);
    }
    case SelectionKind::GreedyThreshold:
    case SelectionKind::Capped:
    case SelectionKind::GreedyRandomized: {
        const IndexSet set = rule.kind == SelectionKind::Capped ? capped_set(r, rule.theta)
                                                                : greedy_threshold_set(r, rule.theta);
        if (set.size() == 1)
            return set.front();
        double total = 0.0;
        for (std::size_t i : set)
            total += r[i] * r[i];
        std::uniform_real_distribution<double> u(0.0, total);
        const double target = u(rng);
        double acc = 0.0;
        for (std::size_t i : set)
        {
            acc += r[i] * r[i];
            if (target < acc)
                return i;
        }
        return set.back();
    }
    }
    return 0;
}

} // namespace nlk
