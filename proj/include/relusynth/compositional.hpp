#pragma once

#include "relusynth/holder.hpp"
#include "relusynth/network.hpp"

#include <json.hpp>

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace relusynth {

// One coordinate g_ij of a level. The oracles take the full level input; only coordinates in S may matter.
struct Component {
    std::string name;
    std::vector<std::size_t> S;
    double s = 1;  // smoothness
    double d = 1;  // intrinsic dimension of the projected input set
    std::function<double(const std::vector<double>&)> g;
    // d^alpha g with alpha indexed over S; empty means central differences (step 1e-5 per order).
    std::function<double(const MultiIndex&, const std::vector<double>&)> partial;
};

// f = g_l o ... o g_1 on samples of M; g_0 = id is implicit, levels holds only the non-identity maps.
struct CompositionalSpec {
    std::string name;
    std::size_t D = 1;
    double C = 1;
    double d0 = 0, s0 = 1;  // level-zero entry of the arg max, used only on request; d0 = 0 means D
    std::vector<std::vector<Component>> levels;
    std::function<std::vector<double>(std::mt19937_64&)> sampler;  // covariates on M

    std::size_t level_count() const { return levels.size(); }
    std::vector<std::size_t> dims() const;  // D_0 = D, ..., D_l
    // G_k(x): the first k levels applied to x.
    std::vector<double> apply(const std::vector<double>& x, std::size_t k) const;
    double operator()(const std::vector<double>& x) const { return apply(x, level_count())[0]; }
};

struct ModelDiagnostics {
    bool ok = true;
    std::vector<std::string> violations;  // "(i,j) [C|S|M]: ..."
    struct Entry {
        std::size_t i = 0, j = 0;
        double max_derivative = 0, holder_quotient = 0, max_abs = 0, slope = 0, sparsity_change = 0;
    };
    std::vector<Entry> components;

    nlohmann::json to_json() const;
};

// Structural checks plus (C), (S) and (M) at probes drawn from G_{i-1}(M).
ModelDiagnostics validate_model(const CompositionalSpec& spec, std::size_t probes = 200, std::uint64_t seed = 1,
                                double tol = 1e-6, double dim_tol = 0.35);

struct PropagationBound {
    double telescoped = 0;  // sum_i C^(l-i) max_j eps_ij
    double coarse = 0;      // l max(C^(l-1), 1) max eps_ij
};

// eps[i-1][j] is the sup error of component (i,j), i = 1..l.
PropagationBound propagate_errors(std::size_t levels, double C, const std::vector<std::vector<double>>& eps);

struct ErrorSchedule {
    double eps = 0;
    double eps0 = 0;                // eps / (l (C+1)^l)
    std::vector<double> eps_level;  // eps_i = eps0 (C+1)^i, i = 0..l+1
    std::vector<double> delta;      // measured sup |G^_i - G_i| over M samples, i = 1..l
    bool holds = true;              // delta_i <= eps_{i+1} for all i
};

ErrorSchedule make_schedule(std::size_t levels, double C, double eps);

struct CompositionalOptions {
    std::size_t N = 4, L = 2;            // per-component budget
    HolderOptions holder;                // K, discovery and eval samples of each component
    std::size_t domain_samples = 20000;  // for the component boxes
    std::size_t measure_samples = 2000;  // for delta_i and the final error
    double tol = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool include_level_zero = false;     // count g_0 in arg max d/s
};

struct ComponentReport {
    std::size_t i = 0, j = 0;
    std::vector<double> lo, hi;
    double target_eps = 0;
    double measured_error = -1;
    ApproxReport holder;
};

struct CompositionalReport {
    std::string name;
    double eps = 0;
    double d_star = 0, s_star = 0;
    ErrorSchedule schedule;
    std::vector<ComponentReport> components;
    double final_sup_error = -1;
    bool components_ok = true;
    bool ok = true;  // schedule holds and final error <= eps (1 + tol)
    SizeReport size;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_rows() const;
};

struct CompositionalResult {
    Network net;
    CompositionalReport report;
};

CompositionalResult compositional_net(const CompositionalSpec& spec, double eps, const CompositionalOptions& opt = {});

// Builtin component functions on the restricted vector z = x_S: linear, sum_square, diff_square, sin_linear, norm2.
Component make_component(const nlohmann::json& j);
std::vector<std::string> builtin_component_names();
// {"input_dim", "C", "domain", "levels": [[component, ...], ...]} or {"model": "xy" | "sparse-aggregation" | "identity"}.
CompositionalSpec make_spec(const nlohmann::json& j);
CompositionalSpec builtin_model(const std::string& name);

}  // namespace relusynth
