#include "support/check.hpp"
#include "support/oracles.hpp"

#include "nlk/selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

using namespace nlk;

namespace
{

IndexSet brute_force_greedy(const Vector& r, double theta)
{
    double top = 0.0;
    for (double v : r)
        top = std::max(top, v * v);
    IndexSet out;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] * r[i] >= theta * top)
            out.push_back(i);
    return out;
}

} // namespace

TEST_CASE("greedy threshold set")
{
    const Vector r{3, -1, 2};
    CHECK(greedy_threshold_set(r, 0.5) == IndexSet{0});
    CHECK(greedy_threshold_set(r, 0.4) == IndexSet{0, 2});
    CHECK(greedy_threshold_set(Vector{2, -2, 1}, 1.0) == IndexSet{0, 1});
    CHECK(greedy_threshold_set(Vector{0, 0, -4}, 0.3) == IndexSet{2});

    CHECK_ERROR(greedy_threshold_set(Vector{0, 0}, 0.5), ErrorCode::ZeroResidual);
    CHECK_ERROR(greedy_threshold_set(r, 0.0), ErrorCode::InvalidArgument);
    CHECK_ERROR(greedy_threshold_set(r, 1.5), ErrorCode::InvalidArgument);
}

TEST_CASE("greedy threshold set properties")
{
    Rng rng(2024);
    std::uniform_real_distribution<double> theta_dist(1e-3, 1.0);
    for (int t = 0; t < 1000; ++t)
    {
        const std::size_t m = 1 + t % 40;
        Vector r = oracle::random_vector(rng, m);
        if (t % 7 == 0)
            r[t % m] = -r[(t + 1) % m]; // ties in magnitude
        const double theta = theta_dist(rng);
        const IndexSet set = greedy_threshold_set(r, theta);
        REQUIRE(set == brute_force_greedy(r, theta));

        const double looser = theta * theta_dist(rng);
        const IndexSet wide = greedy_threshold_set(r, looser);
        CHECK(std::includes(wide.begin(), wide.end(), set.begin(), set.end()));

        Vector scaled = r;
        const double c = t % 2 ? -1e3 : 1e-3;
        for (double& v : scaled)
            v *= c;
        CHECK(greedy_threshold_set(scaled, theta) == set);
    }
}

TEST_CASE("capped set")
{
    const Vector r{3, -1, 2};
    // threshold 0.5 * 9 + 0.5 * 14 / 3
    CHECK(capped_set(r, 0.5) == IndexSet{0});
    CHECK(capped_set(Vector{2, -2, 1}, 1.0) == greedy_threshold_set(Vector{2, -2, 1}, 1.0));
    CHECK(capped_set(Vector{-1.5, 1.5, 1.5, -1.5}, 0.3) == IndexSet{0, 1, 2, 3});
    CHECK(capped_set(Vector{0.1, 0.1, 0.1}, 0.9) == IndexSet{0, 1, 2});
    CHECK_ERROR(capped_set(Vector{0, 0}, 0.5), ErrorCode::ZeroResidual);

    Rng rng(5);
    for (int t = 0; t < 200; ++t)
    {
        const Vector v = oracle::random_vector(rng, 1 + t % 25);
        const IndexSet capped = capped_set(v, 0.5);
        const IndexSet greedy = greedy_threshold_set(v, 0.5);
        CHECK_FALSE(capped.empty());
        CHECK(std::includes(greedy.begin(), greedy.end(), capped.begin(), capped.end()));
    }
}

TEST_CASE("maximum residual index")
{
    CHECK(max_residual_index(Vector{1, -5, 5}) == 1);
    CHECK(max_residual_index(Vector{0, 0, 3}) == 2);
    CHECK(max_residual_index(Vector{-7}) == 0);
    CHECK_ERROR(max_residual_index(Vector{0, 0}), ErrorCode::ZeroResidual);
}

TEST_CASE("sampled indices")
{
    Rng rng(1);
    CHECK(sample_index(Vector{4}, {SelectionKind::UniformRandom, 0.5}, rng) == 0);
    CHECK(sample_index(Vector{4}, {SelectionKind::GreedyRandomized, 0.5}, rng) == 0);
    for (int t = 0; t < 100; ++t)
        CHECK(sample_index(Vector{3, -1, 2}, {SelectionKind::GreedyRandomized, 0.5}, rng) == 0);
    CHECK(sample_index(Vector{1, -5, 5}, {SelectionKind::MaxResidual, 0.5}, rng) == 1);
    CHECK_ERROR(sample_index(Vector{0, 0}, {SelectionKind::UniformRandom, 0.5}, rng), ErrorCode::ZeroResidual);
}

TEST_CASE("uniform sampling frequencies")
{
    Rng rng(99);
    std::array<int, 4> counts{};
    constexpr int draws = 100000;
    for (int t = 0; t < draws; ++t)
        ++counts[sample_index(Vector{1, 100, 0, 2}, {SelectionKind::UniformRandom, 0.5}, rng)];
    for (int c : counts)
        CHECK(std::abs(c / double(draws) - 0.25) <= 0.01);
}

TEST_CASE("greedy randomized sampling follows squared residual weights")
{
    // greedy set at theta = 0.1 is {0, 1, 3, 4}; index 2 falls below it
    const Vector r{3, -2, 0.5, 1.5, -2.5};
    const IndexSet set = greedy_threshold_set(r, 0.1);
    REQUIRE(set == IndexSet{0, 1, 3, 4});
    double total = 0.0;
    for (std::size_t i : set)
        total += r[i] * r[i];

    Rng rng(31337);
    std::array<int, 5> counts{};
    constexpr int draws = 100000;
    for (int t = 0; t < draws; ++t)
        ++counts[sample_index(r, {SelectionKind::GreedyRandomized, 0.1}, rng)];
    CHECK(counts[2] == 0);

    double chi2 = 0.0;
    for (std::size_t i : set)
    {
        const double expected = draws * r[i] * r[i] / total;
        chi2 += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    // 3 degrees of freedom, 0.1% upper tail
    CHECK(chi2 < 16.266);
}

TEST_CASE("sampling is reproducible for a seed")
{
    Rng a(42);
    Rng b(42);
    const Vector r{1, 2, 3, 4, 5, 6};
    for (int t = 0; t < 50; ++t)
        CHECK(sample_index(r, {SelectionKind::GreedyRandomized, 0.2}, a) ==
              sample_index(r, {SelectionKind::GreedyRandomized, 0.2}, b));
}
