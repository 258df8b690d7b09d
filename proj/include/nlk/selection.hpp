#ifndef NLK_SELECTION_HPP
#define NLK_SELECTION_HPP

#include "nlk/types.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nlk
{

/// Strictly increasing row positions.
using IndexSet = std::vector<std::size_t>;

/// Random stream threaded explicitly through the randomized rules.
using Rng = std::mt19937_64;

enum class SelectionKind
{
    GreedyThreshold,
    Capped,
    MaxResidual,
    UniformRandom,
    GreedyRandomized,
};

struct SelectionRule
{
    SelectionKind kind = SelectionKind::GreedyThreshold;
    double theta = 0.5;
};

/// {i : r_i^2 >= theta * max_j r_j^2}.
IndexSet greedy_threshold_set(std::span<const double> r, double theta);

/// {i : r_i^2 >= theta * max_j r_j^2 + (1 - theta) * |r|^2 / m}.
IndexSet capped_set(std::span<const double> r, double theta);

/// Smallest index attaining max |r_i|.
std::size_t max_residual_index(std::span<const double> r);

/// Draws a single row. UniformRandom ignores r's magnitudes; GreedyRandomized
/// samples inside the greedy set with probability proportional to r_i^2.
/// Deterministic rules (MaxResidual) are answered without touching rng.
std::size_t sample_index(std::span<const double> r, const SelectionRule& rule, Rng& rng);

} // namespace nlk

#endif // NLK_SELECTION_HPP
