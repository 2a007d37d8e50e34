#pragma once

#include "relusynth/holder.hpp"
#include "relusynth/network.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace relusynth {

struct TrainConfig {
    double lr = 0.05;        // initial step, cosine-decayed to lr / 100
    double momentum = 0.9;
    std::size_t batch = 32;
    std::size_t epochs = 200;
    std::size_t restarts = 3;
    double accept_tol = 1e-6;  // accepted when loss <= benchmark + accept_tol
    std::uint64_t seed = 1;
};

struct Architecture {
    std::size_t N = 1, L = 1;  // class budget
    std::size_t width = 8;     // trained hidden width
    double B = 16;             // weight magnitude bound, enforced by clipping
};

struct RegressionConfig {
    HolderTarget target;  // f_0, covariate sampler on M, s and d
    double sigma = 0.1;
    std::vector<std::size_t> n_grid{128, 256, 512, 1024, 2048, 4096};
    std::size_t trials = 5;
    std::size_t L = 2;           // L_n
    double arch_scale = 4.0;     // N_n = ceil(arch_scale sqrt(eps_n^(-d/s)) / L)
    std::size_t width_factor = 8;
    double B = 16;
    TrainConfig train;
    std::size_t mc_samples = 4000;
    bool benchmark = true;
    double benchmark_scale = 1.0;  // the constructive benchmark uses this scale in place of arch_scale
    std::size_t benchmark_discovery = 50000;
    double band_lo = 1.4, band_hi = 0.5;  // pass when slope in [band_lo e, band_hi e], e = -2s/(2s+d)
    std::uint64_t seed = 1;
    unsigned threads = 1;

    double d() const { return target.d > 0 ? target.d : static_cast<double>(target.D); }
};

void validate(const RegressionConfig& cfg);

// n^(-s/(2s+d)) log(n)^(s/(2s+d))
double rate_eps(double n, double s, double d);
Architecture architecture_for(const RegressionConfig& cfg, std::size_t n, double scale = 0);  // 0: arch_scale

struct Dataset {
    std::vector<std::vector<double>> X;
    std::vector<double> Y;
};

Dataset gen_regression_data(const RegressionConfig& cfg, std::size_t n, std::uint64_t seed);

double empirical_loss(const Network& net, const Dataset& data, unsigned threads = 1);

struct TrainResult {
    Network net;  // f64
    double empirical_loss = 0;
    std::size_t restarts_used = 0;
    bool suboptimal = false;  // benchmark never reached
};

// Mini-batch SGD with momentum on the square loss; weights clipped to [-B, B] after every step.
TrainResult train_erm(const Dataset& data, const Architecture& arch, const TrainConfig& cfg,
                      double benchmark_loss = std::numeric_limits<double>::infinity());

struct RiskEstimate {
    double risk = 0, se = 0;
};

RiskEstimate risk_eval(const Network& net, const std::function<double(const std::vector<double>&)>& f,
                       const std::function<std::vector<double>(std::mt19937_64&)>& sampler, std::size_t mc_samples,
                       std::uint64_t seed, unsigned threads = 1);

struct TrialRecord {
    std::size_t n = 0, trial = 0;
    std::uint64_t seed = 0;
    std::size_t N = 0, L = 0;
    double B = 0;
    double empirical_loss = 0, benchmark_loss = -1, risk = 0, risk_se = 0;
    bool suboptimal = false;
};

struct RateReport {
    std::vector<TrialRecord> rows;  // ordered by (n, trial)
    std::vector<std::size_t> n;
    std::vector<double> mean_risk, sd_risk;
    std::vector<double> complexity;  // class_covering_bound(N_n, L_n, B_n, eps_n^2) / n
    double slope = 0, intercept = 0;
    double exponent = 0;  // -2s/(2s+d)
    double band_lo = 0, band_hi = 0;
    bool pass = false;
    std::size_t suboptimal_trials = 0;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv() const;
};

RateReport rate_experiment(const RegressionConfig& cfg);

}  // namespace relusynth
