#include "relusynth/compositional.hpp"
#include "relusynth/geometry.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace relusynth;

namespace {

CompositionalOptions small_budget() {
    CompositionalOptions o;
    o.N = 2;
    o.L = 2;
    o.holder.discovery_samples = 100000;
    o.holder.eval_samples = 200;
    o.domain_samples = 5000;
    o.measure_samples = 200;
    return o;
}

}  // namespace

TEST(Schedule, GeometricLevels) {
    auto s = make_schedule(2, 4, 0.01);
    EXPECT_DOUBLE_EQ(s.eps0, 0.01 / 50);
    ASSERT_EQ(s.eps_level.size(), 4u);
    EXPECT_NEAR(s.eps_level[1], 1e-3, 1e-15);
    EXPECT_NEAR(s.eps_level[2], 5e-3, 1e-15);
    EXPECT_NEAR(s.eps_level[2], 0.01 / 2, 1e-15);  // eps_l = eps / l
    EXPECT_THROW(make_schedule(1, 1, 3.0), std::invalid_argument);
    EXPECT_THROW(make_schedule(1, 1, 0.0), std::invalid_argument);
}

TEST(Propagate, Examples) {
    auto one = propagate_errors(1, 3, {{0.1, 0.4, 0.2}});
    EXPECT_DOUBLE_EQ(one.telescoped, 0.4);
    EXPECT_DOUBLE_EQ(one.coarse, 0.4);
    auto two = propagate_errors(2, 2, {{0.1}, {0.1}});
    EXPECT_NEAR(two.telescoped, 0.3, 1e-15);
    EXPECT_NEAR(two.coarse, 0.4, 1e-15);
    EXPECT_THROW(propagate_errors(2, 2, {{0.1}}), std::invalid_argument);
    EXPECT_THROW(propagate_errors(1, 2, {{-0.1}}), std::invalid_argument);
}

TEST(Propagate, TelescopedBelowCoarse) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t l = 1 + t % 5;
        const double C = 0.1 + 4 * u(rng);
        std::vector<std::vector<double>> e(l);
        for (auto& row : e)
            for (int j = 0; j < 3; ++j) row.push_back(u(rng));
        auto b = propagate_errors(l, C, e);
        EXPECT_LE(b.telescoped, b.coarse * (1 + 1e-12));
    }
}

TEST(Propagate, MonteCarloCompositionsWithinBound) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        auto sim = oracle::simulate_lipschitz_composition(rng);
        auto b = propagate_errors(sim.levels, sim.C, sim.eps);
        EXPECT_LE(sim.max_gap, b.telescoped * (1 + 1e-12)) << t;
    }
}

TEST(ValidateModel, XyModelPasses) {
    auto spec = builtin_model("xy");
    EXPECT_EQ(spec.level_count(), 2u);
    EXPECT_EQ(spec.dims(), (std::vector<std::size_t>{2, 2, 1}));
    auto d = validate_model(spec);
    EXPECT_TRUE(d.ok) << (d.violations.empty() ? "" : d.violations[0]);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        auto x = spec.sampler(rng);
        EXPECT_NEAR(spec(x), x[0] * x[1], 1e-14);
    }
}

TEST(ValidateModel, IdentityPassesVacuously) {
    auto d = validate_model(builtin_model("identity"));
    EXPECT_TRUE(d.ok);
    EXPECT_TRUE(d.components.empty());
}

TEST(ValidateModel, OffSparsityReadIsFlagged) {
    auto spec = builtin_model("sparse-aggregation");
    // Component (1,1) declares S = {0, 1} but also reads x_3.
    auto& c = spec.levels[0][0];
    auto g = c.g;
    c.g = [g](const std::vector<double>& x) { return g(x) + 0.01 * x[3]; };
    auto d = validate_model(spec);
    ASSERT_FALSE(d.ok);
    EXPECT_NE(d.violations[0].find("(1,1) [C]"), std::string::npos) << d.violations[0];
}

TEST(ValidateModel, SmoothnessAndDimensionViolations) {
    auto spec = builtin_model("xy");
    spec.C = 2;  // (x+y)^2 reaches 4
    auto d = validate_model(spec);
    EXPECT_FALSE(d.ok);
    bool s_flag = false;
    for (const auto& v : d.violations) s_flag |= v.find("(1,1) [S]") != std::string::npos;
    EXPECT_TRUE(s_flag);

    auto spec2 = builtin_model("xy");
    spec2.levels[0][0].d = 1;  // the input set is a square
    auto d2 = validate_model(spec2);
    EXPECT_FALSE(d2.ok);
    EXPECT_NE(d2.violations[0].find("(1,1) [M]"), std::string::npos) << d2.violations[0];
}

TEST(ValidateModel, HolderQuotientForFractionalSmoothness) {
    nlohmann::json j = {{"input_dim", 1},
                        {"C", 1},
                        {"levels", {{{{"fn", "sin_linear"}, {"S", {0}}, {"coeffs", {1.0}}, {"s", 1.5}, {"d", 1}}}}}};
    auto d = validate_model(make_spec(j));
    EXPECT_TRUE(d.ok);
    EXPECT_GT(d.components[0].holder_quotient, 0);
    j["levels"][0][0]["coeffs"] = {3.0};  // derivative 3 > C
    EXPECT_FALSE(validate_model(make_spec(j)).ok);
}

TEST(ValidateModel, StructuralErrors) {
    nlohmann::json j = {{"input_dim", 2}, {"C", 1}, {"levels", {{{{"fn", "norm2"}, {"S", {0, 5}}}}}}};
    EXPECT_FALSE(validate_model(make_spec(j)).ok);
    j["levels"] = {{{{"fn", "norm2"}, {"S", {0}}}, {{"fn", "norm2"}, {"S", {1}}}}};
    EXPECT_FALSE(validate_model(make_spec(j)).ok);  // last level has two outputs
    EXPECT_THROW(make_spec({{"input_dim", 1}, {"levels", {{{{"fn", "cube_root"}, {"S", {0}}}}}}}),
                 std::invalid_argument);
    EXPECT_THROW(make_spec({{"input_dim", 2}, {"domain", "curve"}}), std::invalid_argument);
    EXPECT_THROW(builtin_model("nope"), std::invalid_argument);
}

TEST(Components, PartialsMatchFiniteDifferences) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    const std::vector<nlohmann::json> specs = {
        {{"fn", "linear"}, {"S", {1, 2}}, {"coeffs", {0.5, -2}}, {"bias", 1}},
        {{"fn", "sum_square"}, {"S", {0, 2}}},
        {{"fn", "diff_square"}, {"S", {2, 0}}},
        {{"fn", "sin_linear"}, {"S", {0, 1, 2}}, {"coeffs", {0.3, -0.7, 1.1}}, {"bias", 0.2}},
        {{"fn", "norm2"}, {"S", {0, 1}}}};
    for (const auto& js : specs) {
        auto c = make_component(js);
        const std::size_t m = c.S.size();
        for (int t = 0; t < 20; ++t) {
            std::vector<double> x{u(rng), u(rng), u(rng)};
            for (const auto& a : multi_indices(m, 1)) {
                if (std::accumulate(a.begin(), a.end(), 0) == 0) {
                    EXPECT_NEAR(c.partial(a, x), c.g(x), 1e-14);
                    continue;
                }
                std::size_t q = std::find(a.begin(), a.end(), 1) - a.begin();
                auto xp = x, xm = x;
                xp[c.S[q]] += 1e-6;
                xm[c.S[q]] -= 1e-6;
                EXPECT_NEAR(c.partial(a, x), (c.g(xp) - c.g(xm)) / 2e-6, 1e-6) << js.dump();
            }
            for (const auto& a : multi_indices(m, 2)) {
                if (std::accumulate(a.begin(), a.end(), 0) != 2) continue;
                // second derivative via differences of first derivatives
                std::size_t q = std::find_if(a.begin(), a.end(), [](int v) { return v > 0; }) - a.begin();
                MultiIndex lower = a;
                lower[q] -= 1;
                auto xp = x, xm = x;
                xp[c.S[q]] += 1e-6;
                xm[c.S[q]] -= 1e-6;
                EXPECT_NEAR(c.partial(a, x), (c.partial(lower, xp) - c.partial(lower, xm)) / 2e-6, 1e-6) << js.dump();
            }
        }
    }
}

TEST(Invariants, LipschitzImageDimension) {
    nlohmann::json j = {{"input_dim", 3},
                        {"C", 4},
                        {"domain", {{"type", "curve"}, {"amplitude", 0.2}}},
                        {"levels",
                         {{{{"fn", "norm2"}, {"S", {0, 1, 2}}, {"s", 2}, {"d", 1}},
                           {{"fn", "sin_linear"}, {"S", {1, 2}}, {"coeffs", {0.8, 0.4}}, {"s", 2}, {"d", 1}}},
                          {{{"fn", "linear"}, {"S", {0, 1}}, {"coeffs", {0.5, 0.5}}, {"s", 2}, {"d", 1}}}}}};
    auto spec = make_spec(j);
    EXPECT_TRUE(validate_model(spec).ok);
    std::mt19937_64 rng(7);
    PointCloud M, G1;
    for (int n = 0; n < 4000; ++n) {
        auto x = spec.sampler(rng);
        M.points.push_back(x);
        G1.points.push_back(spec.apply(x, 1));
    }
    const double sM = minkowski_slope(M, default_eps_grid(M)).slope;
    const double sG = minkowski_slope(G1, default_eps_grid(G1)).slope;
    EXPECT_LE(sG, std::min(sM, 2.0) + 0.35);
    EXPECT_NEAR(sM, 1.0, 0.3);
}

TEST(CompositionalNet, IdentityIsExact) {
    auto r = compositional_net(builtin_model("identity"), 0.01);
    Evaluator ev(r.net);
    for (double x : {0.0, 0.25, 0.7, 1.0}) EXPECT_DOUBLE_EQ(ev.eval_double(std::vector<double>{x})[0], x);
    EXPECT_EQ(r.report.final_sup_error, 0);
}

TEST(CompositionalNet, XyModelDenseGrid) {
    auto spec = builtin_model("xy");
    auto opt = small_budget();
    auto r = compositional_net(spec, 0.01, opt);
    EXPECT_DOUBLE_EQ(r.report.d_star, 2);
    EXPECT_DOUBLE_EQ(r.report.s_star, 2);
    ASSERT_EQ(r.report.schedule.delta.size(), 2u);
    EXPECT_TRUE(r.report.schedule.holds);
    EXPECT_TRUE(r.report.components_ok);
    for (std::size_t i = 0; i < 2; ++i)
        EXPECT_LE(r.report.schedule.delta[i], r.report.schedule.eps_level[i + 2]);
    // Dense grid oracle against x*y directly.
    std::vector<std::vector<double>> grid;
    for (int a = 0; a <= 20; ++a)
        for (int b = 0; b <= 20; ++b) grid.push_back({a / 20.0, b / 20.0});
    auto out = Evaluator(r.net).eval_batch(grid);
    double err = 0;
    for (std::size_t n = 0; n < grid.size(); ++n) err = std::max(err, std::abs(out[n][0] - grid[n][0] * grid[n][1]));
    EXPECT_LE(err, 0.01);
    EXPECT_LE(r.report.final_sup_error, 0.01);
}

TEST(CompositionalNet, SparseAggregationWithinSchedule) {
    auto spec = builtin_model("sparse-aggregation");
    auto r = compositional_net(spec, 0.1, small_budget());
    EXPECT_TRUE(r.report.schedule.holds);
    EXPECT_LE(r.report.final_sup_error, 0.1);
    std::mt19937_64 rng(8);
    Evaluator ev(r.net);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(4);
        for (auto& v : x) v = std::uniform_real_distribution<double>(0, 1)(rng);
        const double want = 0.5 * std::sin(0.5 * x[0] + 0.5 * x[1]) + 0.5 * std::sin(0.5 * x[2] - 0.5 * x[3] + 0.3);
        EXPECT_NEAR(ev.eval_double(x)[0], want, 0.1);
    }
}

TEST(CompositionalNet, RejectsInvalidModel) {
    auto spec = builtin_model("xy");
    spec.C = 1;
    EXPECT_THROW(compositional_net(spec, 0.01, small_budget()), std::invalid_argument);
}
