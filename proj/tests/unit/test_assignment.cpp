#include <gtest/gtest.h>

#include <limits>

#include "../support/oracles.hpp"
#include "plg/assignment.hpp"
#include "plg/error.hpp"
#include "plg/random.hpp"

using namespace plg;

TEST(Hungarian, IdentityFavoring) {
    Eigen::MatrixXd c(2, 2);
    c << 0, 9, 9, 0;
    const auto a = hungarian_assign(c);
    EXPECT_EQ(a.pairs, (std::vector<std::pair<int, int>>{{0, 0}, {1, 1}}));
    EXPECT_DOUBLE_EQ(a.cost, 0);
}

TEST(Hungarian, MatchesPermutationOracle) {
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const int rows = 1 + static_cast<int>(uniform_index(rng, 6)), cols = 1 + static_cast<int>(uniform_index(rng, 6));
        Eigen::MatrixXd c(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) c(i, j) = static_cast<double>(uniform_index(rng, 10));
        const auto a = hungarian_assign(c);
        EXPECT_NEAR(a.cost, plgtest::permutation_min_cost(c), 1e-9) << t;
        EXPECT_EQ(a.pairs.size(), static_cast<std::size_t>(std::min(rows, cols)));
        double sum = 0;
        std::vector<char> used(static_cast<std::size_t>(cols), 0);
        for (auto [r, k] : a.pairs) {
            sum += c(r, k);
            EXPECT_FALSE(used[static_cast<std::size_t>(k)]);
            used[static_cast<std::size_t>(k)] = 1;
        }
        EXPECT_DOUBLE_EQ(sum, a.cost);
    }
}

TEST(Hungarian, Rectangular) {
    Eigen::MatrixXd c(1, 3);
    c << 5, 2, 7;
    const auto a = hungarian_assign(c);
    ASSERT_EQ(a.pairs.size(), 1u);
    EXPECT_EQ(a.pairs[0], std::make_pair(0, 1));
    EXPECT_DOUBLE_EQ(a.cost, 2);
    Eigen::MatrixXd t = c.transpose();
    EXPECT_EQ(hungarian_assign(t).pairs[0], std::make_pair(1, 0));
}

TEST(Hungarian, EmptyAndNonFinite) {
    EXPECT_TRUE(hungarian_assign(Eigen::MatrixXd(0, 3)).pairs.empty());
    Eigen::MatrixXd c(2, 2);
    c << 1, std::numeric_limits<double>::infinity(), 0, 1;
    EXPECT_THROW(hungarian_assign(c), Error);
}
