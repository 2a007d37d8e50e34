#include "relusynth/geometry.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>

using namespace relusynth;

namespace {

PointCloud uniform_cube(std::size_t n, std::size_t D, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    PointCloud c;
    c.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> p(D);
        for (auto& v : p) v = u(rng);
        c.points.push_back(p);
    }
    return c;
}

PointCloud segment(std::size_t n, std::size_t D, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i) {
        double t = u(rng);
        std::vector<double> p(D);
        for (std::size_t k = 0; k < D; ++k) p[k] = 0.1 + 0.8 * t * (k % 2 ? 1.0 : 0.5);
        c.points.push_back(p);
    }
    return c;
}

// Minimal number of blocks over all set partitions whose blocks have coordinate ranges <= 2 eps.
std::size_t partition_oracle(const PointCloud& c, double eps) {
    const std::size_t n = c.points.size(), D = c.dim();
    std::vector<std::vector<std::size_t>> blocks;
    std::size_t best = n;
    auto ok = [&](const std::vector<std::size_t>& b) {
        for (std::size_t k = 0; k < D; ++k) {
            double lo = 1e300, hi = -1e300;
            for (auto i : b) {
                lo = std::min(lo, c.points[i][k]);
                hi = std::max(hi, c.points[i][k]);
            }
            if (hi - lo > 2 * eps) return false;
        }
        return true;
    };
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (blocks.size() >= best) return;
        if (i == n) {
            best = blocks.size();
            return;
        }
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            blocks[k].push_back(i);
            if (ok(blocks[k])) rec(i + 1);
            blocks[k].pop_back();
        }
        blocks.push_back({i});
        rec(i + 1);
        blocks.pop_back();
    };
    rec(0);
    return best;
}

// Optimal 1-d cover: sweep left to right with intervals of length 2 eps.
std::size_t interval_oracle(std::vector<double> xs, double eps) {
    std::sort(xs.begin(), xs.end());
    std::size_t k = 0;
    double end = -std::numeric_limits<double>::infinity();
    for (double x : xs)
        if (x > end) {
            ++k;
            end = x + 2 * eps;
        }
    return k;
}

}  // namespace

TEST(GreedyCover, UnitIntervalHalfRadiusIsOneBall) {
    auto c = uniform_cube(1000, 1, 3);
    auto r = greedy_cover(c, 0.5);
    EXPECT_EQ(r.count, 1u);
    EXPECT_TRUE(is_cover(c, r));
    EXPECT_EQ(r.method, "greedy");
}

TEST(GreedyCover, TwoClustersNeedTwoBalls) {
    PointCloud c;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.02, 0.02);
    for (int i = 0; i < 50; ++i) {
        c.points.push_back({u(rng), u(rng)});
        c.points.push_back({1 + u(rng), u(rng)});
    }
    auto r = greedy_cover(c, 0.1);
    EXPECT_GE(r.count, 2u);
    EXPECT_TRUE(is_cover(c, r));
}

TEST(GreedyCover, AlwaysACoverAndMonotone) {
    auto c = uniform_cube(600, 3, 5);
    std::size_t prev = 0;
    for (double eps : {0.5, 0.3, 0.2, 0.1, 0.05, 0.02}) {
        auto r = greedy_cover(c, eps);
        EXPECT_TRUE(is_cover(c, r)) << eps;
        EXPECT_GE(r.count, prev) << eps;
        prev = r.count;
    }
    FarthestPointOrder fp(c);
    for (std::size_t k = 1; k < fp.radii().size(); ++k) EXPECT_LE(fp.radii()[k], fp.radii()[k - 1]);
}

TEST(ExactCover, MatchesPartitionOracleAndBoundsGreedy) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = uniform_cube(8 + trial % 3, 1 + trial % 3, 100 + trial);
        const double eps = std::uniform_real_distribution<double>(0.05, 0.35)(rng);
        auto ex = exact_cover(c, eps);
        EXPECT_TRUE(is_cover(c, ex));
        EXPECT_EQ(ex.count, partition_oracle(c, eps)) << trial;
        EXPECT_GE(greedy_cover(c, eps).count, ex.count) << trial;
        EXPECT_EQ(ex.method, "exact-small");
    }
}

TEST(ExactCover, OneDimensionalSweepOracle) {
    for (int trial = 0; trial < 20; ++trial) {
        auto c = uniform_cube(20, 1, 200 + trial);
        std::vector<double> xs;
        for (const auto& p : c.points) xs.push_back(p[0]);
        EXPECT_EQ(exact_cover(c, 0.07).count, interval_oracle(xs, 0.07));
    }
    EXPECT_THROW(exact_cover(uniform_cube(21, 1, 1), 0.1), std::invalid_argument);
    EXPECT_THROW(greedy_cover(uniform_cube(5, 1, 1), 0.0), std::invalid_argument);
}

TEST(MinkowskiSlope, SegmentInR3) {
    auto c = segment(5000, 3, 7);
    auto fit = minkowski_slope(c, default_eps_grid(c, 8, 2.0));
    EXPECT_GE(fit.slope, 0.8);
    EXPECT_LE(fit.slope, 1.2);
    EXPECT_EQ(fit.residuals.size(), static_cast<std::size_t>(std::count(fit.used.begin(), fit.used.end(), true)));
}

TEST(MinkowskiSlope, SquareInR2) {
    auto c = uniform_cube(20000, 2, 8);
    std::vector<double> grid;
    for (int i = 0; i < 6; ++i) grid.push_back(0.4 * std::pow(10.0, -1.6 * i / 5.0));
    auto fit = minkowski_slope(c, grid);
    EXPECT_GE(fit.slope, 1.7);
    EXPECT_LE(fit.slope, 2.3);
}

TEST(MinkowskiSlope, SinglePointAndDegenerateGrids) {
    PointCloud c;
    c.points = {{0.3, 0.3}};
    auto fit = minkowski_slope(c, {1, 0.3, 0.1, 0.03, 0.01});
    EXPECT_NEAR(fit.slope, 0.0, 1e-12);
    EXPECT_THROW(minkowski_slope(c, {1, 0.1, 0.01}), std::invalid_argument);
    EXPECT_THROW(minkowski_slope(c, {1, 0.5, 0.2, 0.1}), std::invalid_argument);
    EXPECT_THROW(minkowski_slope(c, {1, 0.1, 0.01, 0.0}), std::invalid_argument);
}

TEST(ClassBound, HandEvaluation) {
    // 16 * 3 * log(5^3 * 2^3 / 0.1) = 48 log 10^4
    auto b = class_covering_bound(4, 3, 2, 0.1);
    EXPECT_NEAR(b.log_count, 48 * 4 * std::log(10.0), 1e-9);
    EXPECT_FALSE(b.vacuous);
    EXPECT_TRUE(class_covering_bound(1, 1, 1, 2.5).vacuous);
}

TEST(ClassBound, Structure) {
    const double a = class_covering_bound(8, 3, 2, 0.1).log_count;
    const double b = class_covering_bound(8, 3, 2, 0.05).log_count;
    EXPECT_NEAR(b - a, 64 * 3 * std::log(2.0), 1e-9);
    const double r = class_covering_bound(64, 3, 2, 1e-300).log_count / class_covering_bound(32, 3, 2, 1e-300).log_count;
    EXPECT_NEAR(r, 4.0, 0.05);
}

TEST(Enlargement, Formula) {
    EXPECT_DOUBLE_EQ(enlargement_cover_bound(7, 0, 0.1, 3, 2.0), 14.0);
    EXPECT_DOUBLE_EQ(enlargement_cover_bound(7, 0.15, 0.1, 2), 7 * 9.0);
    EXPECT_DOUBLE_EQ(enlargement_cover_bound_smooth(7, 0.1, 0.1, 2), 28.0);
    EXPECT_THROW(enlargement_cover_bound(0, 0.1, 0.1, 2), std::invalid_argument);
}

TEST(Enlargement, SegmentInR2GreedyWithinBound) {
    auto A = segment(400, 2, 9);
    std::mt19937_64 rng(10);
    for (double eta : {0.2, 0.1, 0.05}) {
        const double eps = eta;
        std::uniform_real_distribution<double> j(-eps, eps);
        PointCloud E;
        for (const auto& p : A.points)
            for (int r = 0; r < 5; ++r) E.points.push_back({p[0] + j(rng), p[1] + j(rng)});
        const double nA = static_cast<double>(greedy_cover(A, eta).count);
        const double nE = static_cast<double>(greedy_cover(E, eta).count);
        EXPECT_LE(nE, enlargement_cover_bound(nA, eps, eta, 2, greedy_enlargement_constant(2)));
        EXPECT_LE(nE, enlargement_cover_bound_smooth(nA, eps, eta, 2, greedy_enlargement_constant(2)));
    }
}

TEST(Enlargement, LargeScaleIsOneBall) {
    auto A = segment(100, 2, 11);
    EXPECT_EQ(greedy_cover(A, 2.0).count, 1u);
}

TEST(CloudIo, CsvAndJson) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto csv = (dir / "relusynth_cloud.csv").string();
    const auto js = (dir / "relusynth_cloud.json").string();
    {
        std::ofstream(csv) << "x,y\n0.1,0.2\n0.3,0.4\n";
        std::ofstream(js) << R"({"points": [[1, 2, 3]], "description": "one", "seed": 5})";
    }
    auto a = load_cloud(csv);
    ASSERT_EQ(a.points.size(), 2u);
    EXPECT_DOUBLE_EQ(a.points[1][0], 0.3);
    auto b = load_cloud(js);
    EXPECT_EQ(b.dim(), 3u);
    EXPECT_EQ(b.seed, 5u);
    {
        std::ofstream(csv) << "0.1,0.2\n0.3\n";
    }
    EXPECT_THROW(load_cloud(csv), std::invalid_argument);
    EXPECT_THROW(load_cloud((dir / "relusynth_missing.csv").string()), std::invalid_argument);
    std::filesystem::remove(csv);
    std::filesystem::remove(js);
}
