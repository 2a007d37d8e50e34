#pragma once

#include "relusynth/memorize.hpp"
#include "relusynth/network.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace relusynth {

using MultiIndex = std::vector<int>;

struct HolderTarget {
    std::string name;
    std::size_t D = 1;
    double s = 1;       // smoothness
    double C = 1;       // scale: f / C is approximated at unit scale
    double d = 0;       // intrinsic dimension of the sample set; 0 means D
    std::vector<double> lo, hi;  // box containing the samples; empty means [0,1]^D
    std::function<double(const std::vector<double>&)> f;
    // d^alpha f at x, for |alpha| <= floor(s).
    std::function<double(const MultiIndex&, const std::vector<double>&)> partial;
    std::function<std::vector<double>(std::mt19937_64&)> sampler;

    int order() const;  // floor(s)
    double lo_at(std::size_t i) const { return lo.empty() ? 0.0 : lo[i]; }
    double hi_at(std::size_t i) const { return hi.empty() ? 1.0 : hi[i]; }
};

// Checks every partial against a central difference of the next lower one.
void validate(const HolderTarget& t, std::size_t probes = 16, std::uint64_t seed = 1, double tol = 1e-4);

// All alpha in N^D with |alpha| <= k, graded then lexicographic.
std::vector<MultiIndex> multi_indices(std::size_t D, int k);
double factorial(const MultiIndex& a);

// Central-difference partials of f up to order k (step 1e-5 per order); accuracy degrades with order.
std::function<double(const MultiIndex&, const std::vector<double>&)> finite_difference_partials(
    std::function<double(const std::vector<double>&)> f);

struct GridPartition {
    std::size_t K = 1;
    std::size_t D = 1;
    std::vector<std::vector<long>> occupied;  // sorted

    bool contains(const std::vector<long>& beta) const;
};

// Cells hit by sampled points and by their shifts x + t*shift, t in {-1,0,1}^D, in normalized coordinates.
GridPartition discover_cells(const HolderTarget& t, std::size_t K, double shift, std::size_t samples,
                             std::uint64_t seed);

// Exact staircase: k/K on [k/K, (k+1)/K - gap] (the last plateau has no gap), 0 for x <= 0.
Network step_net(std::size_t K, std::size_t N, std::size_t L, int r);
Network step_net_with_gap(std::size_t K, const mpq_class& gap, std::size_t N, std::size_t L);
// x -> cell corner, coordinatewise.
Network grid_snap_net(std::size_t K, std::size_t D, std::size_t N, std::size_t L, const mpq_class& gap);

// x^alpha on [0,1]^D within 9k(N+1)^(-7kL), k = |alpha|.
Network monomial_net(const MultiIndex& alpha, std::size_t N, std::size_t L);
// (x, y) -> xy on [0,1]^2; inputs are clamped to [0,1].
Network product_net(std::size_t N, std::size_t stages);
// Error bound quoted for monomial_net.
double monomial_bound(const MultiIndex& alpha, std::size_t N, std::size_t L);

// xi_{beta, alpha} = d^alpha f(x_beta) / alpha! for every occupied cell, in the target's own coordinates.
std::map<std::vector<long>, std::vector<double>> taylor_coeffs(const HolderTarget& t, const GridPartition& grid,
                                                               const std::vector<MultiIndex>& alphas);
// 2^-r floor(2^r xi)
double quantize(double xi, int r);

struct HolderOptions {
    double d = 0;                     // 0: target.d, else D
    std::size_t K = 0;                // 0: ceil((N^2 L^2)^(1/d))
    double eps = 0;                   // > 0: target accuracy in units of f; tightens eps to min(K^-s, eps/C)
    std::size_t discovery_samples = 1000000;
    std::size_t eval_samples = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool measure = true;
};

struct ApproxReport {
    std::size_t N = 0, L = 0, K = 0, D = 0;
    double d = 0, s = 0, C = 1;
    double eps = 0;        // K^-s (or the tighter requested accuracy), unit scale
    double delta = 0;      // band width
    int r = 0;             // coefficient bits
    std::size_t cells = 0;
    std::size_t N_memorize = 0;
    std::vector<MultiIndex> alphas;
    std::vector<double> alpha_scales;
    MemorizeReport memorize;
    SizeReport snap_size, memorize_size, inner_size, size;
    std::size_t eval_points = 0, eval_skipped = 0;
    double measured_sup_error = -1;
    double bound = 0;      // C (NL)^(-2s/d)

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

struct HolderResult {
    Network net;
    ApproxReport report;
};

HolderResult holder_approx_net(const HolderTarget& t, std::size_t N, std::size_t L, const HolderOptions& opt = {});

// Sup of |net - f| over eval samples whose shifted cells were all discovered.
double measure_sup_error(const Network& net, const HolderTarget& t, const GridPartition* grid, double shift,
                         std::size_t samples, std::uint64_t seed, unsigned threads, std::size_t* used = nullptr,
                         std::size_t* skipped = nullptr);

// Sum over support of a K^-s prod_j g(K x_j - beta_j), g(u) = u^p (1-u)^p on [0,1], p = floor(s) + 1.
HolderTarget bump_target(const std::vector<std::vector<long>>& support, std::size_t K, double s, double a,
                         std::size_t D);

// Builtin targets by name; parameters come from the JSON object.
HolderTarget make_target(const nlohmann::json& spec);
std::vector<std::string> builtin_target_names();

}  // namespace relusynth
