#include "relusynth/holder.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace relusynth {

namespace {

constexpr double TWO_PI = 2 * std::numbers::pi;

int degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

// k-th derivative of sin(2 pi x) and cos(2 pi x).
double dsin(int k, double x) { return std::pow(TWO_PI, k) * std::sin(TWO_PI * x + k * std::numbers::pi / 2); }
double dcos(int k, double x) { return std::pow(TWO_PI, k) * std::cos(TWO_PI * x + k * std::numbers::pi / 2); }

double falling(int p, int i) {
    double v = 1;
    for (int j = 0; j < i; ++j) v *= p - j;
    return v;
}

double binom(int n, int k) { return falling(n, k) / falling(k, k); }

// m-th derivative of u^p (1-u)^p on [0,1], zero outside.
double bump1d(int p, int m, double u) {
    if (u <= 0 || u >= 1) return 0;
    double v = 0;
    for (int i = 0; i <= m; ++i) {
        int j = m - i;
        if (i > p || j > p) continue;
        double a = falling(p, i) * std::pow(u, p - i);
        double b = falling(p, j) * std::pow(1 - u, p - j) * (j % 2 ? -1.0 : 1.0);
        v += binom(m, i) * a * b;
    }
    return v;
}

// Closed curve t -> (t, 1/2 + a sin 2 pi t, 1/2 + a cos 2 pi t) in [0,1]^3.
std::function<std::vector<double>(std::mt19937_64&)> curve_sampler(double amp) {
    return [amp](std::mt19937_64& rng) {
        double t = std::uniform_real_distribution<double>(0, 1)(rng);
        return std::vector<double>{t, 0.5 + amp * std::sin(TWO_PI * t), 0.5 + amp * std::cos(TWO_PI * t)};
    };
}

std::function<std::vector<double>(std::mt19937_64&)> cube_sampler(std::size_t D) {
    return [D](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0, 1);
        std::vector<double> x(D);
        for (auto& v : x) v = u(rng);
        return x;
    };
}

}  // namespace

HolderTarget bump_target(const std::vector<std::vector<long>>& support, std::size_t K, double s, double a,
                         std::size_t D) {
    if (K == 0 || D == 0 || !(s > 0)) throw std::invalid_argument("bump_target: bad parameters");
    for (const auto& b : support) {
        if (b.size() != D) throw std::invalid_argument("bump_target: support index dimension mismatch");
        for (long v : b)
            if (v < 0 || v >= static_cast<long>(K)) throw std::invalid_argument("bump_target: support index out of range");
    }
    HolderTarget t;
    t.name = "bump";
    t.D = D;
    t.s = s;
    t.C = 1;
    t.d = static_cast<double>(D);
    const int p = static_cast<int>(std::floor(s + 1e-12)) + 1;
    const double Kd = static_cast<double>(K), scale = a * std::pow(Kd, -s);
    auto eval = [=](const MultiIndex& alpha, const std::vector<double>& x) {
        double total = 0;
        for (const auto& b : support) {
            double v = scale;
            for (std::size_t j = 0; j < D && v != 0; ++j)
                v *= std::pow(Kd, alpha[j]) * bump1d(p, alpha[j], Kd * x[j] - static_cast<double>(b[j]));
            total += v;
        }
        return total;
    };
    t.partial = eval;
    t.f = [=](const std::vector<double>& x) { return eval(MultiIndex(D, 0), x); };
    t.sampler = cube_sampler(D);
    return t;
}

std::vector<std::string> builtin_target_names() {
    return {"zero", "constant", "affine", "square", "sin", "product", "sin-curve", "sin-cos-curve", "bump"};
}

HolderTarget make_target(const nlohmann::json& spec) {
    if (!spec.is_object()) throw std::invalid_argument("target spec must be a JSON object");
    const std::string name = spec.contains("target") ? spec.at("target").get<std::string>()
                                                     : spec.value("name", std::string());
    const double s = spec.value("s", 1.0);
    HolderTarget t;
    t.name = name;
    t.s = s;
    if (name == "zero" || name == "constant") {
        const std::size_t D = spec.value("D", std::size_t{1});
        const double c = name == "zero" ? 0.0 : spec.value("c", 1.0);
        t.D = D;
        t.f = [c](const std::vector<double>&) { return c; };
        t.partial = [c](const MultiIndex& a, const std::vector<double>&) { return degree(a) == 0 ? c : 0.0; };
        t.sampler = cube_sampler(D);
        t.C = std::max(1.0, std::abs(c));
    } else if (name == "affine") {
        const auto w = spec.at("coeffs").get<std::vector<double>>();
        const double b = spec.value("bias", 0.0);
        if (w.empty()) throw std::invalid_argument("affine target needs coeffs");
        t.D = w.size();
        t.f = [w, b](const std::vector<double>& x) { return std::inner_product(w.begin(), w.end(), x.begin(), b); };
        t.partial = [w, b](const MultiIndex& a, const std::vector<double>& x) {
            int k = degree(a);
            if (k == 0) return std::inner_product(w.begin(), w.end(), x.begin(), b);
            if (k > 1) return 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (a[i]) return w[i];
            return 0.0;
        };
        t.sampler = cube_sampler(t.D);
        t.C = std::max(1.0, std::abs(b) + std::accumulate(w.begin(), w.end(), 0.0, [](double acc, double v) {
                                return acc + std::abs(v);
                            }));
    } else if (name == "square") {
        t.D = 1;
        t.f = [](const std::vector<double>& x) { return x[0] * x[0]; };
        t.partial = [](const MultiIndex& a, const std::vector<double>& x) {
            switch (a[0]) {
                case 0: return x[0] * x[0];
                case 1: return 2 * x[0];
                case 2: return 2.0;
                default: return 0.0;
            }
        };
        t.sampler = cube_sampler(1);
    } else if (name == "sin") {
        t.D = 1;
        t.f = [](const std::vector<double>& x) { return std::sin(TWO_PI * x[0]); };
        t.partial = [](const MultiIndex& a, const std::vector<double>& x) { return dsin(a[0], x[0]); };
        t.sampler = cube_sampler(1);
    } else if (name == "product") {
        t.D = 2;
        t.f = [](const std::vector<double>& x) { return x[0] * x[1]; };
        t.partial = [](const MultiIndex& a, const std::vector<double>& x) {
            if (a[0] > 1 || a[1] > 1) return 0.0;
            return (a[0] ? 1.0 : x[1]) * (a[1] ? 1.0 : x[0]);
        };
        t.sampler = cube_sampler(2);
    } else if (name == "sin-curve" || name == "sin-cos-curve") {
        const double amp = spec.value("amplitude", 0.15);
        if (!(amp > 0 && amp < 0.5)) throw std::invalid_argument("curve amplitude must lie in (0, 1/2)");
        t.D = 3;
        t.d = 1;
        t.sampler = curve_sampler(amp);
        if (name == "sin-curve") {
            t.f = [](const std::vector<double>& x) { return std::sin(TWO_PI * x[0]); };
            t.partial = [](const MultiIndex& a, const std::vector<double>& x) {
                return a[1] || a[2] ? 0.0 : dsin(a[0], x[0]);
            };
        } else {
            t.f = [](const std::vector<double>& x) { return std::sin(TWO_PI * x[0]) * std::cos(TWO_PI * x[1]); };
            t.partial = [](const MultiIndex& a, const std::vector<double>& x) {
                return a[2] ? 0.0 : dsin(a[0], x[0]) * dcos(a[1], x[1]);
            };
        }
    } else if (name == "bump") {
        const std::size_t D = spec.value("D", std::size_t{1});
        const std::size_t K = spec.value("K", std::size_t{4});
        const auto support = spec.value("support", std::vector<std::vector<long>>{});
        t = bump_target(support, K, s, spec.value("a", 1.0), D);
    } else {
        throw std::invalid_argument("unknown target '" + name + "'");
    }
    if (spec.contains("C")) t.C = spec.at("C").get<double>();
    if (spec.contains("d")) t.d = spec.at("d").get<double>();
    validate(t);
    return t;
}

}  // namespace relusynth
