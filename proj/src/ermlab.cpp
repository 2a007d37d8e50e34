#include "relusynth/ermlab.hpp"

#include "relusynth/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace relusynth {

void validate(const RegressionConfig& cfg) {
    if (!cfg.target.f || !cfg.target.sampler) throw std::invalid_argument("regression: target needs f and a sampler");
    if (!(cfg.sigma >= 0)) throw std::invalid_argument("regression: sigma must be non-negative");
    if (cfg.n_grid.empty()) throw std::invalid_argument("regression: empty n-grid");
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] < 2) throw std::invalid_argument("regression: sample sizes must be at least 2");
        if (i && cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw std::invalid_argument("regression: n-grid must ascend");
    }
    if (cfg.trials < 3) throw std::invalid_argument("regression: at least 3 trials");
    if (cfg.L == 0 || cfg.width_factor == 0 || !(cfg.arch_scale > 0) || !(cfg.benchmark_scale > 0) || !(cfg.B > 0))
        throw std::invalid_argument("regression: bad architecture schedule");
    if (cfg.mc_samples < 1000) throw std::invalid_argument("regression: mc_samples must be at least 1000");
    if (cfg.train.batch == 0 || cfg.train.epochs == 0 || !(cfg.train.lr > 0))
        throw std::invalid_argument("regression: bad optimizer config");
}

double rate_eps(double n, double s, double d) {
    const double e = s / (2 * s + d);
    return std::pow(n, -e) * std::pow(std::log(n), e);
}

Architecture architecture_for(const RegressionConfig& cfg, std::size_t n, double scale) {
    if (!(scale > 0)) scale = cfg.arch_scale;
    const double s = cfg.target.s, d = cfg.d();
    const double NL = std::sqrt(std::pow(rate_eps(static_cast<double>(n), s, d), -d / s));
    Architecture a;
    a.L = cfg.L;
    a.N = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(scale * NL / static_cast<double>(cfg.L))));
    a.width = cfg.width_factor * a.N;
    a.B = cfg.B;
    return a;
}

Dataset gen_regression_data(const RegressionConfig& cfg, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("gen_regression_data: n must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0, 1);
    Dataset d;
    d.X.reserve(n);
    d.Y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.X.push_back(cfg.target.sampler(rng));
        const double e = noise(rng);
        d.Y.push_back(cfg.target.f(d.X.back()) + cfg.sigma * e);
    }
    return d;
}

double empirical_loss(const Network& net, const Dataset& data, unsigned threads) {
    const auto out = Evaluator(net).eval_batch(data.X, threads);
    double s = 0;
    for (std::size_t i = 0; i < out.size(); ++i) s += (data.Y[i] - out[i][0]) * (data.Y[i] - out[i][0]);
    return s / static_cast<double>(out.size());
}

namespace {

struct Mlp {
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;

    Eigen::MatrixXd forward(const Eigen::MatrixXd& X, std::vector<Eigen::MatrixXd>* acts = nullptr) const {
        Eigen::MatrixXd A = X;
        if (acts) acts->assign(1, A);
        for (std::size_t l = 0; l < W.size(); ++l) {
            Eigen::MatrixXd Z = (W[l] * A).colwise() + b[l];
            if (l + 1 < W.size()) Z = Z.cwiseMax(0.0);
            A = std::move(Z);
            if (acts) acts->push_back(A);
        }
        return A;
    }

    Network to_network() const {
        const ScalarKind k = ScalarKind::f64();
        std::vector<Layer> layers;
        for (std::size_t l = 0; l < W.size(); ++l) {
            Matrix::Builder mb(static_cast<std::size_t>(W[l].rows()), static_cast<std::size_t>(W[l].cols()), k);
            std::vector<Scalar> v;
            for (Eigen::Index i = 0; i < W[l].rows(); ++i) {
                for (Eigen::Index j = 0; j < W[l].cols(); ++j)
                    mb.add(static_cast<std::size_t>(i), static_cast<std::size_t>(j), Scalar(W[l](i, j)));
                v.emplace_back(b[l](i));
            }
            layers.push_back({mb.build(), std::move(v)});
        }
        return Network(k, std::move(layers));
    }
};

Eigen::MatrixXd columns(const std::vector<std::vector<double>>& X) {
    const std::size_t D = X.empty() ? 0 : X[0].size();
    Eigen::MatrixXd M(D, X.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t k = 0; k < D; ++k) M(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = X[i][k];
    return M;
}

double mse(const Mlp& m, const Eigen::MatrixXd& X, const Eigen::RowVectorXd& Y) {
    return (m.forward(X).row(0) - Y).squaredNorm() / static_cast<double>(Y.size());
}

Mlp train_once(const Eigen::MatrixXd& X, const Eigen::RowVectorXd& Y, const Architecture& arch, const TrainConfig& cfg,
               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    std::vector<std::size_t> dims{static_cast<std::size_t>(X.rows())};
    for (std::size_t l = 0; l < arch.L; ++l) dims.push_back(arch.width);
    dims.push_back(1);
    Mlp m;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double sd = std::sqrt((l + 2 < dims.size() ? 2.0 : 1.0) / static_cast<double>(dims[l]));
        Eigen::MatrixXd W(dims[l + 1], dims[l]);
        for (Eigen::Index i = 0; i < W.size(); ++i) W.data()[i] = sd * g(rng);
        m.W.push_back(W);
        m.b.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dims[l + 1]), l + 2 < dims.size() ? 0.01 : 0.0));
    }
    std::vector<Eigen::MatrixXd> vW;
    std::vector<Eigen::VectorXd> vb;
    for (std::size_t l = 0; l < m.W.size(); ++l) {
        vW.push_back(Eigen::MatrixXd::Zero(m.W[l].rows(), m.W[l].cols()));
        vb.push_back(Eigen::VectorXd::Zero(m.b[l].size()));
    }
    const std::size_t n = static_cast<std::size_t>(X.cols());
    const std::size_t bs = std::min(cfg.batch, n);
    const std::size_t steps_per_epoch = (n + bs - 1) / bs;
    const double total = static_cast<double>(cfg.epochs * steps_per_epoch);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t step = 0;
    std::vector<Eigen::MatrixXd> acts;
    for (std::size_t ep = 0; ep < cfg.epochs; ++ep) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t s0 = 0; s0 < n; s0 += bs, ++step) {
            const std::size_t cnt = std::min(bs, n - s0);
            Eigen::MatrixXd xb(X.rows(), cnt);
            Eigen::RowVectorXd yb(cnt);
            for (std::size_t i = 0; i < cnt; ++i) {
                xb.col(static_cast<Eigen::Index>(i)) = X.col(static_cast<Eigen::Index>(perm[s0 + i]));
                yb(static_cast<Eigen::Index>(i)) = Y(static_cast<Eigen::Index>(perm[s0 + i]));
            }
            const Eigen::MatrixXd out = m.forward(xb, &acts);
            Eigen::MatrixXd delta = 2.0 * (out.row(0) - yb) / static_cast<double>(cnt);
            const double lr = cfg.lr * (0.01 + 0.99 * 0.5 * (1 + std::cos(std::numbers::pi * step / total)));
            for (std::size_t l = m.W.size(); l-- > 0;) {
                const Eigen::MatrixXd gW = delta * acts[l].transpose();
                const Eigen::VectorXd gb = delta.rowwise().sum();
                if (l > 0) delta = (m.W[l].transpose() * delta).cwiseProduct((acts[l].array() > 0).cast<double>().matrix());
                vW[l] = cfg.momentum * vW[l] - lr * gW;
                vb[l] = cfg.momentum * vb[l] - lr * gb;
                m.W[l] = (m.W[l] + vW[l]).cwiseMax(-arch.B).cwiseMin(arch.B);
                m.b[l] = (m.b[l] + vb[l]).cwiseMax(-arch.B).cwiseMin(arch.B);
            }
        }
    }
    return m;
}

}  // namespace

TrainResult train_erm(const Dataset& data, const Architecture& arch, const TrainConfig& cfg, double benchmark_loss) {
    if (data.X.empty() || data.X.size() != data.Y.size()) throw std::invalid_argument("train_erm: bad dataset");
    if (arch.L == 0 || arch.width == 0 || !(arch.B > 0)) throw std::invalid_argument("train_erm: bad architecture");
    const Eigen::MatrixXd X = columns(data.X);
    const Eigen::RowVectorXd Y = Eigen::Map<const Eigen::RowVectorXd>(data.Y.data(), static_cast<Eigen::Index>(data.Y.size()));
    TrainResult best;
    best.empirical_loss = std::numeric_limits<double>::infinity();
    Mlp kept;
    for (std::size_t r = 0; r <= cfg.restarts; ++r) {
        Mlp m = train_once(X, Y, arch, cfg, cfg.seed + 0x9e3779b97f4a7c15ull * r);
        const double loss = mse(m, X, Y);
        best.restarts_used = r;
        if (loss < best.empirical_loss) {
            best.empirical_loss = loss;
            kept = std::move(m);
        }
        if (best.empirical_loss <= benchmark_loss + cfg.accept_tol) break;
    }
    best.suboptimal = !(best.empirical_loss <= benchmark_loss + cfg.accept_tol);
    best.net = kept.to_network();
    return best;
}

RiskEstimate risk_eval(const Network& net, const std::function<double(const std::vector<double>&)>& f,
                       const std::function<std::vector<double>(std::mt19937_64&)>& sampler, std::size_t mc_samples,
                       std::uint64_t seed, unsigned threads) {
    if (mc_samples < 1000) throw std::invalid_argument("risk_eval: at least 1000 Monte Carlo samples");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> xs(mc_samples);
    for (auto& x : xs) x = sampler(rng);
    const auto out = Evaluator(net).eval_batch(xs, threads);
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = out[i][0] - f(xs[i]);
        s += e * e;
        s2 += e * e * e * e;
    }
    const double m = static_cast<double>(mc_samples);
    RiskEstimate r;
    r.risk = s / m;
    r.se = std::sqrt(std::max(0.0, s2 / m - r.risk * r.risk) / m);
    return r;
}

nlohmann::json RateReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["mean_risk"] = mean_risk;
    j["sd_risk"] = sd_risk;
    j["complexity"] = complexity;
    j["slope"] = slope;
    j["intercept"] = intercept;
    j["exponent"] = exponent;
    j["band"] = {band_lo, band_hi};
    j["pass"] = pass;
    j["suboptimal_trials"] = suboptimal_trials;
    return j;
}

std::string RateReport::csv_header() {
    return "n,trial,seed,N,L,B,empirical_loss,benchmark_loss,risk,risk_se,status";
}

std::string RateReport::csv() const {
    std::ostringstream o;
    o.precision(10);
    o << csv_header() << '\n';
    for (const auto& r : rows)
        o << r.n << ',' << r.trial << ',' << r.seed << ',' << r.N << ',' << r.L << ',' << r.B << ',' << r.empirical_loss
          << ',' << r.benchmark_loss << ',' << r.risk << ',' << r.risk_se << ','
          << (r.suboptimal ? "suboptimal-ERM" : "ok") << '\n';
    return o.str();
}

RateReport rate_experiment(const RegressionConfig& cfg) {
    validate(cfg);
    RateReport rep;
    const double s = cfg.target.s, d = cfg.d();
    rep.exponent = -2 * s / (2 * s + d);
    rep.band_lo = cfg.band_lo * rep.exponent;
    rep.band_hi = cfg.band_hi * rep.exponent;

    // Constructive benchmark per n, shared across trials.
    std::map<std::size_t, Network> bench;
    if (cfg.benchmark)
        for (std::size_t n : cfg.n_grid) {
            const auto a = architecture_for(cfg, n, cfg.benchmark_scale);
            HolderOptions ho;
            ho.discovery_samples = cfg.benchmark_discovery;
            ho.measure = false;
            ho.seed = cfg.seed;
            bench.emplace(n, holder_approx_net(cfg.target, a.N, a.L, ho).net);
        }

    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t n : cfg.n_grid)
        for (std::size_t t = 0; t < cfg.trials; ++t) tasks.emplace_back(n, t);
    rep.rows.resize(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < tasks.size();) {
            try {
                const auto [n, t] = tasks[k];
                TrialRecord& r = rep.rows[k];
                r.n = n;
                r.trial = t;
                r.seed = cfg.seed * 1000003ull + n * 7919ull + t;
                const auto a = architecture_for(cfg, n);
                r.N = a.N;
                r.L = a.L;
                r.B = a.B;
                const auto data = gen_regression_data(cfg, n, r.seed);
                double bl = std::numeric_limits<double>::infinity();
                if (cfg.benchmark) bl = r.benchmark_loss = empirical_loss(bench.at(n), data);
                TrainConfig tc = cfg.train;
                tc.seed = r.seed ^ 0xabcdefull;
                auto tr = train_erm(data, a, tc, bl);
                r.empirical_loss = tr.empirical_loss;
                r.suboptimal = cfg.benchmark && tr.suboptimal;
                auto risk = risk_eval(tr.net, cfg.target.f, cfg.target.sampler, cfg.mc_samples, r.seed + 17);
                r.risk = risk.risk;
                r.risk_se = risk.se;
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    {
        const unsigned nt = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(tasks.size())));
        std::vector<std::thread> pool;
        for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t n : cfg.n_grid) {
        double m = 0, m2 = 0;
        for (const auto& r : rep.rows)
            if (r.n == n) {
                m += r.risk;
                m2 += r.risk * r.risk;
                rep.suboptimal_trials += r.suboptimal;
            }
        const double T = static_cast<double>(cfg.trials);
        m /= T;
        rep.n.push_back(n);
        rep.mean_risk.push_back(m);
        rep.sd_risk.push_back(std::sqrt(std::max(0.0, (m2 - T * m * m) / (T - 1))));
        const auto a = architecture_for(cfg, n);
        const double en = rate_eps(static_cast<double>(n), s, d);
        rep.complexity.push_back(
            class_covering_bound(static_cast<double>(a.N), static_cast<double>(a.L), a.B, en * en).log_count /
            static_cast<double>(n));
        const double x = std::log(static_cast<double>(n)), y = std::log(std::max(m, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = static_cast<double>(cfg.n_grid.size());
    const double den = k * sxx - sx * sx;
    rep.slope = den > 0 ? (k * sxy - sx * sy) / den : 0.0;
    rep.intercept = (sy - rep.slope * sx) / k;
    rep.pass = rep.slope >= rep.band_lo && rep.slope <= rep.band_hi;
    return rep;
}

}  // namespace relusynth
