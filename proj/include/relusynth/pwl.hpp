#pragma once

#include "relusynth/network.hpp"

#include <utility>
#include <vector>

namespace relusynth {

struct PwlSpec {
    std::vector<std::pair<Scalar, Scalar>> points;  // (x_i, y_i), x strictly increasing
    bool const_left = true;
    bool const_right = true;
};

// Several outputs sharing one breakpoint set: values[k][i] is output k at xs[i].
struct PwlMultiSpec {
    std::vector<Scalar> xs;
    std::vector<std::vector<Scalar>> values;
    bool const_left = true;
    bool const_right = true;
};

void validate(const PwlSpec& spec);
void validate(const PwlMultiSpec& spec);

// One hidden layer: y_1 + sum_i (slope_i - slope_{i-1}) relu(x - x_i).
Network pwl_net(const PwlSpec& spec, ScalarKind kind = ScalarKind::rational());
Network pwl_net(const PwlMultiSpec& spec, ScalarKind kind = ScalarKind::rational());

// Same function with hidden width capped at `max_width`; ramps are spread over
// consecutive layers while x and the partial sums ride along as relu pairs.
// With `passthrough`, x is appended as an extra (first) output.
Network pwl_net_chained(const PwlMultiSpec& spec, std::size_t max_width, bool passthrough,
                        ScalarKind kind = ScalarKind::rational());

// min_i |x_i - x_{i-1}| / max{1, max_i |x_i|}
double pwl_normalized_gap(const PwlSpec& spec);
// log2 of the weight budget (M^6 delta^-4 ybar)^(1/L) quoted for depth-L realizations.
double pwl_budget_log2_magnitude(const PwlSpec& spec, std::size_t L);

// 6-point bump: 2^-s on [-2^-(s+2), 2^-(s+2)], zero outside (-2^-(s+1), 2^-(s+1)).
Network bump_net(int s, ScalarKind kind = ScalarKind::rational());

// Exact median of three inputs; width 6, depth 2, weights in {-1, 0, 1}.
Network mid_net(ScalarKind kind = ScalarKind::rational());

struct SmoothingConfig {
    std::size_t K = 1;
    Scalar delta = Scalar(mpq_class(1, 3));
    std::size_t D = 1;
    bool allow_large_D = false;  // lift the D <= 8 cap
};

void validate(const SmoothingConfig& cfg);

// D-fold coordinatewise median over shifts +-delta e_i.
Network median_smooth(const Network& net, const SmoothingConfig& cfg);

// Membership in the band set: some x_j lies in (k/K - delta, k/K) for k = 1..K-1.
bool in_band(const std::vector<double>& x, std::size_t K, double delta);
bool in_band(const std::vector<mpq_class>& x, std::size_t K, const mpq_class& delta);

}  // namespace relusynth
