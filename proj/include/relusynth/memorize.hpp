#pragma once

#include "relusynth/network.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relusynth {

struct MemorizationInstance {
    std::vector<std::vector<mpq_class>> x;        // points in [0,1]^D
    std::vector<std::vector<std::uint64_t>> y;    // one label vector per point, entries < 2^r
    mpq_class delta;                              // minimum pairwise sup-distance
    int r = 1;

    std::size_t J() const { return x.size(); }
    std::size_t D() const { return x.empty() ? 0 : x[0].size(); }
    std::size_t outputs() const { return y.empty() ? 1 : y[0].size(); }
};

void validate(const MemorizationInstance& inst);

struct ProjectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProjectionResult {
    std::vector<double> u;          // unit direction
    std::vector<mpq_class> u_tilde;  // u / sqrt(D) rounded to binary64, held exactly
    mpq_class achieved_gap;          // min_{i != j} |u~^T (x_i - x_j)|
    mpq_class R;                     // 2 J^2 D / delta
    std::size_t tries = 0;
};

ProjectionResult separating_direction(const std::vector<std::vector<mpq_class>>& points, const mpq_class& delta,
                                      std::size_t max_tries, std::uint64_t seed);

struct MemorizeOptions {
    std::optional<ScalarKind> kind;   // default: rational when L | (s + r), else bigfloat
    std::size_t pwl_width_cap = 0;    // 0: cap at max(N, minimum); SIZE_MAX: one hidden layer
    std::uint64_t seed = 1;
    std::size_t max_tries = 0;        // 0: 10 J^2
};

struct MemorizeReport {
    std::size_t J = 0, n = 0, L_prime = 0, M = 0;
    int s = 0, s_prime = 0, c = 0, r = 0;
    ScalarKind kind;
    SizeReport size;
    // Quoted budget: width N, depth and magnitude as in the point-fitting statement.
    double budget_width = 0, budget_depth = 0, budget_magnitude = 0;
    std::size_t projection_tries = 0;
};

// xs need not be sorted; labels[j] holds the label vector of xs[j].
Network memorize_1d(const std::vector<mpq_class>& xs, const std::vector<std::vector<std::uint64_t>>& labels, int r,
                    std::size_t N, std::size_t L, int s, const MemorizeOptions& opt = {},
                    MemorizeReport* report = nullptr);

Network memorize_nd(const MemorizationInstance& inst, std::size_t N, std::size_t L, const MemorizeOptions& opt = {},
                    MemorizeReport* report = nullptr);

// Digits per decode step and the number of values packed per code word.
std::size_t memorize_n(std::size_t N);
std::size_t memorize_L_prime(std::size_t N, std::size_t L);
// Working precision used for bigfloat construction.
int memorize_bits(int c, std::size_t L_prime, int s, int r);

}  // namespace relusynth
