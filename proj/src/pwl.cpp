#include "relusynth/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace relusynth {

namespace {

PwlMultiSpec as_multi(const PwlSpec& spec) {
    PwlMultiSpec m;
    m.const_left = spec.const_left;
    m.const_right = spec.const_right;
    m.values.resize(1);
    for (const auto& [x, y] : spec.points) {
        m.xs.push_back(x);
        m.values[0].push_back(y);
    }
    return m;
}

// One ramp unit relu(sign * (x - at)) with per-output coefficients.
struct Ramp {
    int sign;
    Scalar at;
    std::vector<Scalar> coef;
};

struct Expansion {
    std::vector<Scalar> offset;  // value at x_0 per output
    std::vector<Ramp> ramps;
};

Expansion expand(const PwlMultiSpec& spec) {
    validate(spec);
    const std::size_t M = spec.xs.size(), m = spec.values.size();
    Expansion e;
    std::vector<std::vector<Scalar>> slope(m);
    for (std::size_t k = 0; k < m; ++k) {
        e.offset.push_back(spec.values[k][0]);
        for (std::size_t i = 0; i + 1 < M; ++i)
            slope[k].push_back((spec.values[k][i + 1] - spec.values[k][i]) / (spec.xs[i + 1] - spec.xs[i]));
    }
    if (!spec.const_left) {
        Ramp r{-1, spec.xs[0], {}};
        for (std::size_t k = 0; k < m; ++k) r.coef.push_back(-slope[k][0]);
        e.ramps.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < M; ++i) {
        Ramp r{1, spec.xs[i], {}};
        bool any = false;
        for (std::size_t k = 0; k < m; ++k) {
            Scalar prev = i == 0 ? Scalar(mpq_class(0)) : slope[k][i - 1];
            Scalar next = i + 1 < M ? slope[k][i] : (spec.const_right ? Scalar(mpq_class(0)) : slope[k][M - 2]);
            r.coef.push_back(next - prev);
            any = any || !r.coef.back().is_zero();
        }
        if (any) e.ramps.push_back(std::move(r));
    }
    return e;
}

}  // namespace

void validate(const PwlSpec& spec) { validate(as_multi(spec)); }

void validate(const PwlMultiSpec& spec) {
    if (spec.xs.size() < 2) throw std::invalid_argument("pwl: need at least two breakpoints");
    for (std::size_t i = 1; i < spec.xs.size(); ++i)
        if (!(spec.xs[i - 1] < spec.xs[i])) throw std::invalid_argument("pwl: breakpoints must be strictly increasing");
    if (spec.values.empty()) throw std::invalid_argument("pwl: no outputs");
    for (const auto& v : spec.values)
        if (v.size() != spec.xs.size()) throw std::invalid_argument("pwl: value count mismatch");
}

Network pwl_net(const PwlSpec& spec, ScalarKind kind) { return pwl_net(as_multi(spec), kind); }

Network pwl_net(const PwlMultiSpec& spec, ScalarKind kind) {
    Expansion e = expand(spec);
    const std::size_t m = spec.values.size(), H = std::max<std::size_t>(e.ramps.size(), 1);
    Matrix::Builder w0(H, 1, kind), w1(m, H, kind);
    std::vector<Scalar> v0(H, Scalar::zero(kind)), v1;
    for (std::size_t h = 0; h < e.ramps.size(); ++h) {
        const Ramp& r = e.ramps[h];
        w0.add(h, 0, Scalar(mpq_class(r.sign)));
        v0[h] = (r.sign > 0 ? -r.at : r.at).to(kind);
        for (std::size_t k = 0; k < m; ++k) w1.add(k, h, r.coef[k]);
    }
    for (std::size_t k = 0; k < m; ++k) v1.push_back(e.offset[k].to(kind));
    std::vector<Layer> layers;
    layers.push_back({w0.build(), std::move(v0)});
    layers.push_back({w1.build(), std::move(v1)});
    return Network(kind, std::move(layers));
}

Network pwl_net_chained(const PwlMultiSpec& spec, std::size_t max_width, bool passthrough, ScalarKind kind) {
    Expansion e = expand(spec);
    const std::size_t m = spec.values.size();
    if (max_width < 3 + 2 * m) throw std::invalid_argument("pwl_net_chained: width cap too small");
    const std::size_t per = max_width - 2 - 2 * m;
    const std::size_t chunks = std::max<std::size_t>(1, (e.ramps.size() + per - 1) / per);
    if (chunks == 1 && !passthrough) return pwl_net(spec, kind);

    const Scalar one(mpq_class(1)), neg(mpq_class(-1));
    auto chunk_of = [&](std::size_t c) {
        std::size_t a = c * per, b = std::min(e.ramps.size(), a + per);
        return std::pair{a, b};
    };
    // Hidden layout per layer: [ramps of chunk c][x+ x-][acc+ acc- per output (c >= 1)]
    std::vector<Layer> layers;
    std::size_t prev_ramps = 0;
    bool prev_acc = false;
    for (std::size_t c = 0; c < chunks; ++c) {
        auto [a, b] = chunk_of(c);
        const std::size_t nr = b - a;
        const bool acc = c >= 1;
        const std::size_t rows = nr + 2 + (acc ? 2 * m : 0);
        const std::size_t cols = c == 0 ? 1 : prev_ramps + 2 + (prev_acc ? 2 * m : 0);
        Matrix::Builder w(rows, cols, kind);
        std::vector<Scalar> v(rows, Scalar::zero(kind));
        // x expressed in terms of the previous layer.
        auto add_x = [&](std::size_t row, const Scalar& scale) {
            if (c == 0) {
                w.add(row, 0, scale);
            } else {
                w.add(row, prev_ramps, scale);
                w.add(row, prev_ramps + 1, -scale);
            }
        };
        for (std::size_t h = 0; h < nr; ++h) {
            const Ramp& r = e.ramps[a + h];
            add_x(h, Scalar(mpq_class(r.sign)));
            v[h] = (r.sign > 0 ? -r.at : r.at).to(kind);
        }
        add_x(nr, one);
        add_x(nr + 1, neg);
        if (acc) {
            auto [pa, pb] = chunk_of(c - 1);
            for (std::size_t k = 0; k < m; ++k) {
                std::size_t rp = nr + 2 + 2 * k, rn = rp + 1;
                for (std::size_t h = pa; h < pb; ++h) {
                    w.add(rp, h - pa, e.ramps[h].coef[k]);
                    w.add(rn, h - pa, -e.ramps[h].coef[k]);
                }
                if (prev_acc) {
                    std::size_t pp = prev_ramps + 2 + 2 * k;
                    w.add(rp, pp, one);
                    w.add(rp, pp + 1, neg);
                    w.add(rn, pp, neg);
                    w.add(rn, pp + 1, one);
                }
            }
        }
        layers.push_back({w.build(), std::move(v)});
        prev_ramps = nr;
        prev_acc = acc;
    }
    // Output layer.
    auto [la, lb] = chunk_of(chunks - 1);
    const std::size_t cols = prev_ramps + 2 + (prev_acc ? 2 * m : 0);
    const std::size_t off = passthrough ? 1 : 0;
    Matrix::Builder w(m + off, cols, kind);
    std::vector<Scalar> v(m + off, Scalar::zero(kind));
    if (passthrough) {
        w.add(0, prev_ramps, one);
        w.add(0, prev_ramps + 1, neg);
    }
    for (std::size_t k = 0; k < m; ++k) {
        v[off + k] = e.offset[k].to(kind);
        for (std::size_t h = la; h < lb; ++h) w.add(off + k, h - la, e.ramps[h].coef[k]);
        if (prev_acc) {
            w.add(off + k, prev_ramps + 2 + 2 * k, one);
            w.add(off + k, prev_ramps + 3 + 2 * k, neg);
        }
    }
    layers.push_back({w.build(), std::move(v)});
    return Network(kind, std::move(layers));
}

double pwl_normalized_gap(const PwlSpec& spec) {
    validate(spec);
    double gap = INFINITY, xmax = 1.0;
    for (std::size_t i = 0; i < spec.points.size(); ++i) {
        xmax = std::max(xmax, std::abs(spec.points[i].first.to_double()));
        if (i) gap = std::min(gap, (spec.points[i].first - spec.points[i - 1].first).to_double());
    }
    return gap / xmax;
}

double pwl_budget_log2_magnitude(const PwlSpec& spec, std::size_t L) {
    double ybar = 0;
    for (const auto& p : spec.points) ybar = std::max(ybar, std::abs(p.second.to_double()));
    double M = static_cast<double>(spec.points.size());
    double lg = 6 * std::log2(M) - 4 * std::log2(pwl_normalized_gap(spec)) + std::log2(std::max(ybar, 1e-300));
    return lg / static_cast<double>(std::max<std::size_t>(L, 1));
}

Network bump_net(int s, ScalarKind kind) {
    if (s < 1) throw std::invalid_argument("bump_net: s must be >= 1");
    const mpq_class a = pow2q(-(s + 1)), b = pow2q(-(s + 2)), h = pow2q(-s);
    PwlSpec spec;
    spec.points = {{Scalar(mpq_class(-2)), Scalar(mpq_class(0))}, {Scalar(mpq_class(-a)), Scalar(mpq_class(0))},
                   {Scalar(mpq_class(-b)), Scalar(h)},           {Scalar(b), Scalar(h)},
                   {Scalar(a), Scalar(mpq_class(0))},            {Scalar(mpq_class(2)), Scalar(mpq_class(0))}};
    return pwl_net(spec, kind);
}

Network mid_net(ScalarKind kind) {
    // Layer 1: (x1-x2)+, (x2-x1)+, (x2-x3)+, (x3-x2)+, T+, T-  with T = x1 + x2 - x3.
    Matrix::Builder w0(6, 3, kind);
    const int W0[6][3] = {{1, -1, 0}, {-1, 1, 0}, {0, 1, -1}, {0, -1, 1}, {1, 1, -1}, {-1, -1, 1}};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) w0.add(i, j, W0[i][j]);
    // Layer 2: A = (h12 + h23 - h32)+, B = (h32 - h23 + h21)+, T'+, T'-.
    Matrix::Builder w1(4, 6, kind);
    const int W1[4][6] = {{1, 0, 1, -1, 0, 0}, {0, 1, -1, 1, 0, 0}, {0, 0, 0, 0, 1, -1}, {0, 0, 0, 0, -1, 1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 6; ++j) w1.add(i, j, W1[i][j]);
    // mid = T - A + B
    Matrix::Builder w2(1, 4, kind);
    w2.add(0, 0, -1);
    w2.add(0, 1, 1);
    w2.add(0, 2, 1);
    w2.add(0, 3, -1);
    std::vector<Layer> layers;
    layers.push_back({w0.build(), std::vector<Scalar>(6, Scalar::zero(kind))});
    layers.push_back({w1.build(), std::vector<Scalar>(4, Scalar::zero(kind))});
    layers.push_back({w2.build(), std::vector<Scalar>(1, Scalar::zero(kind))});
    return Network(kind, std::move(layers));
}

void validate(const SmoothingConfig& cfg) {
    if (cfg.K < 1 || cfg.D < 1) throw std::invalid_argument("median_smooth: K and D must be positive");
    mpq_class d = cfg.delta.to_rational();
    if (!(d > 0) || d > mpq_class(1, 3 * static_cast<long>(cfg.K)))
        throw std::invalid_argument("median_smooth: delta must lie in (0, 1/(3K)]");
}

Network median_smooth(const Network& net, const SmoothingConfig& cfg) {
    validate(cfg);
    if (net.input_dim() != cfg.D) throw std::invalid_argument("median_smooth: input dimension differs from D");
    if (net.output_dim() != 1) throw std::invalid_argument("median_smooth: scalar-valued network required");
    if (cfg.D > 8) {
        if (!cfg.allow_large_D)
            throw std::invalid_argument("median_smooth: D > 8 exceeds the default width budget (3^D copies)");
        std::fprintf(stderr, "warning: median_smooth with D=%zu replicates the base network 3^D times\n", cfg.D);
    }
    const ScalarKind k = net.kind();
    const Network mid = mid_net(k);
    Network cur = net;
    for (std::size_t j = 0; j < cfg.D; ++j) {
        std::vector<Network> copies;
        for (int t : {-1, 0, 1}) {
            std::vector<Scalar> shift(cfg.D, Scalar::zero(k));
            shift[j] = (cfg.delta * Scalar(mpq_class(t))).to(k);
            Network sh = affine_net(Matrix::identity(cfg.D, k), shift);
            copies.push_back(t == 0 ? cur : compose(cur, sh));
        }
        cur = compose(mid, parallelize(copies));
    }
    return cur;
}

bool in_band(const std::vector<double>& x, std::size_t K, double delta) {
    for (double xj : x) {
        double kx = xj * static_cast<double>(K);
        double k = std::ceil(kx);
        if (k == kx) continue;  // on a grid line: not inside the open band
        if (k >= 1 && k <= static_cast<double>(K) - 1 && xj > k / static_cast<double>(K) - delta) return true;
    }
    return false;
}

bool in_band(const std::vector<mpq_class>& x, std::size_t K, const mpq_class& delta) {
    for (const auto& xj : x) {
        mpq_class kx = xj * static_cast<long>(K);
        mpz_class k;
        mpz_cdiv_q(k.get_mpz_t(), kx.get_num_mpz_t(), kx.get_den_mpz_t());
        if (kx == mpq_class(k)) continue;
        if (k >= 1 && k <= static_cast<long>(K) - 1 && xj > mpq_class(k) / static_cast<long>(K) - delta) return true;
    }
    return false;
}

}  // namespace relusynth
