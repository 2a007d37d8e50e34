// Acceptance checks 1-11. One PASS/FAIL line per criterion; exit 0 iff every selected criterion passes.
// Usage: acceptance [--only N[,M...]] [--slow]   (criterion 11 runs only when selected or with --slow)

#include "oracles.hpp"
#include "relusynth/bitcodec.hpp"
#include "relusynth/compositional.hpp"
#include "relusynth/ermlab.hpp"
#include "relusynth/geometry.hpp"
#include "relusynth/holder.hpp"
#include "relusynth/memorize.hpp"
#include "relusynth/network.hpp"
#include "relusynth/pwl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace relusynth;

namespace {

// Pinned tolerances and constants.
constexpr double kF64RelTol = 1e-12;              // 1: binary64 identities
constexpr double kBigfloatRecallTol = 0x1p-40;    // 3: bigfloat recall
constexpr double kMemWidthConst = 4.0;            // 3: width <= c N
constexpr double kMemDepthConst = 4.0;            // 3: depth <= c * quoted depth
constexpr double kMemLogMagConst = 6.0;           // 3: log2 B <= c * log2 quoted B
constexpr double kMedianSlack = 0.05;             // 5: (1 + 0.05) on D * modulus
constexpr double kRateLo = 1.4, kRateHi = 0.6;    // 7: slope in [-2s/d 1.4, -2s/d 0.6]
constexpr double kPropagationRelTol = 1e-12;      // 8: floating-point slack on the telescoped bound
constexpr double kXyTarget = 0.01;                // 10: sup error on [0,1]^2

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    bool slow;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

mpq_class q(long a, long b) {
    mpq_class r(a, b);
    r.canonicalize();
    return r;
}

std::vector<std::size_t> hidden_and_io(const Network& n) { return n.dims(); }

Network random_f64_net(const std::vector<std::size_t>& dims, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Matrix::Builder b(dims[l + 1], dims[l], ScalarKind::f64());
        std::vector<Scalar> v;
        for (std::size_t i = 0; i < dims[l + 1]; ++i) {
            for (std::size_t j = 0; j < dims[l]; ++j) b.add(i, j, Scalar(u(rng)));
            v.push_back(Scalar(u(rng)));
        }
        layers.push_back({b.build(), std::move(v)});
    }
    return Network(ScalarKind::f64(), std::move(layers));
}

// ---------------------------------------------------------------- 1
Outcome combinator_algebra() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> io(1, 4), dep(1, 4), extra(0, 3);
    std::size_t exact_fail = 0, f64_fail = 0, size_fail = 0;
    double worst_rel = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const bool exact = t % 2 == 0;
        const std::size_t a = io(rng), b = io(rng), c = io(rng), e = io(rng);
        auto dg = oracle::random_dims(a, b, dep(rng), rng), df = oracle::random_dims(b, c, dep(rng), rng),
             dh = oracle::random_dims(a, e, dep(rng), rng);
        Network g, f, h;
        if (exact) {
            g = oracle::random_net(dg, ScalarKind::rational(), rng);
            f = oracle::random_net(df, ScalarKind::rational(), rng);
            h = oracle::random_net(dh, ScalarKind::rational(), rng);
        } else {
            g = random_f64_net(dg, rng);
            f = random_f64_net(df, rng);
            h = random_f64_net(dh, rng);
        }
        const Network fg = compose(f, g), gh = parallelize(g, h);
        const std::size_t target = g.depth() + extra(rng);
        const Network ga = depth_align(g, target);

        // Layer-width accounting.
        std::vector<std::size_t> want_fg(dg.begin(), dg.end() - 1);
        want_fg.insert(want_fg.end(), df.begin() + 1, df.end());
        auto aligned = [](std::vector<std::size_t> d, std::size_t L) {
            const std::size_t out = d.back();
            d.pop_back();
            while (d.size() - 1 < L) d.push_back(2 * out);
            d.push_back(out);
            return d;
        };
        const std::size_t Lp = std::max(g.depth(), h.depth());
        auto ag = aligned(dg, Lp), ah = aligned(dh, Lp);
        std::vector<std::size_t> want_gh{a};
        for (std::size_t i = 1; i < ag.size(); ++i) want_gh.push_back(ag[i] + ah[i]);
        if (hidden_and_io(fg) != want_fg || hidden_and_io(gh) != want_gh || hidden_and_io(ga) != aligned(dg, target))
            ++size_fail;

        for (int p = 0; p < 3; ++p) {
            const auto xq = oracle::random_point_q(a, rng);
            if (exact) {
                auto ref_fg = oracle::forward_rational(f, oracle::forward_rational(g, xq));
                auto ref_gh = oracle::forward_rational(g, xq);
                auto hx = oracle::forward_rational(h, xq);
                ref_gh.insert(ref_gh.end(), hx.begin(), hx.end());
                bool ok = oracle::forward_rational(fg, xq) == ref_fg && oracle::forward_rational(gh, xq) == ref_gh &&
                          oracle::forward_rational(ga, xq) == oracle::forward_rational(g, xq);
                const auto x = oracle::to_scalars(xq);
                auto ev = evaluate(fg, x);
                for (std::size_t k = 0; ok && k < ev.size(); ++k) ok = ev[k].to_rational() == ref_fg[k];
                if (!ok) ++exact_fail;
            } else {
                const auto x = oracle::to_doubles(xq);
                auto ref_fg = oracle::forward_double(f, oracle::forward_double(g, x));
                auto ref_gh = oracle::forward_double(g, x);
                auto hx = oracle::forward_double(h, x);
                ref_gh.insert(ref_gh.end(), hx.begin(), hx.end());
                auto got_fg = Evaluator(fg).eval_double(x), got_gh = Evaluator(gh).eval_double(x),
                     got_ga = Evaluator(ga).eval_double(x), ref_ga = oracle::forward_double(g, x);
                bool ok = true;
                auto cmp = [&](const std::vector<double>& u, const std::vector<double>& v) {
                    for (std::size_t k = 0; k < u.size(); ++k) {
                        const double rel = std::abs(u[k] - v[k]) / std::max(1.0, std::abs(v[k]));
                        worst_rel = std::max(worst_rel, rel);
                        ok = ok && rel <= kF64RelTol;
                    }
                };
                cmp(got_fg, ref_fg);
                cmp(got_gh, ref_gh);
                cmp(got_ga, ref_ga);
                if (!ok) ++f64_fail;
            }
        }
    }
    return {exact_fail == 0 && f64_fail == 0 && size_fail == 0,
            fmt("%d nets; exact mismatches %zu, f64 mismatches %zu (worst rel %.2e), size mismatches %zu", trials,
                exact_fail, f64_fail, worst_rel, size_fail)};
}

// ---------------------------------------------------------------- 2
mpq_class binary_prefix(const BitStream& b, std::size_t ell) {
    mpq_class v = 0, w(1, 2);
    for (std::size_t j = 0; j < ell && j < b.size(); ++j, w /= 2)
        if (b[j]) v += w;
    return v;
}

mpq_class ternary_value(const BitStream& b, std::size_t from) {
    mpq_class v = 0, w(1, 3);
    for (std::size_t j = from; j < b.size(); ++j, w /= 3)
        if (b[j]) v += w;
    return v;
}

Outcome bit_codec() {
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<std::size_t> len(1, 48), nd(1, 4), ld(1, 16);
    std::size_t bad = 0;
    const int streams = 200;
    for (int t = 0; t < streams; ++t) {
        BitStream b(len(rng));
        for (auto& x : b) x = static_cast<int>(rng() & 1);
        const std::size_t n = nd(rng), ell = std::min(ld(rng), b.size());
        Network net = bit_decode_net(n, ell);
        // Walk the whole stream in blocks of ell digits.
        mpq_class x = ternary_value(b, 0);
        for (std::size_t from = 0; from < b.size(); from += ell) {
            auto out = evaluate(net, {Scalar(x)});
            BitStream rest(b.begin() + static_cast<long>(from), b.end());
            if (out[0].to_rational() != binary_prefix(rest, ell) || out[1].to_rational() != ternary_value(b, from + ell))
                ++bad;
            x = out[1].to_rational();
        }
    }
    return {bad == 0, fmt("%d streams, %zu decode mismatches", streams, bad)};
}

// ---------------------------------------------------------------- 3
Outcome memorization() {
    std::mt19937_64 rng(303);
    MemorizationInstance inst;
    inst.r = 8;
    inst.delta = q(1, 256);
    std::set<std::vector<long>> seen;
    std::uniform_int_distribution<long> coord(0, 256);
    std::uniform_int_distribution<std::uint64_t> label(0, 255);
    while (inst.x.size() < 64) {
        std::vector<long> c(4);
        for (auto& v : c) v = coord(rng);
        if (!seen.insert(c).second) continue;
        std::vector<mpq_class> x;
        for (long v : c) x.push_back(q(v, 256));
        inst.x.push_back(std::move(x));
        inst.y.push_back({label(rng)});
    }
    struct Mode {
        std::size_t N, L;
        std::optional<ScalarKind> kind;
    };
    std::ostringstream detail;
    bool pass = true;
    for (const auto& m : {Mode{9, 4, ScalarKind::rational()}, Mode{8, 6, ScalarKind::bigfloat(256)}}) {
        MemorizeOptions opt;
        opt.kind = m.kind;
        MemorizeReport rep;
        Network net = memorize_nd(inst, m.N, m.L, opt, &rep);
        const bool exact = net.kind().tag == ScalarKind::Tag::rational;
        const bool divides = (rep.s + rep.r) % static_cast<int>(m.L) == 0;
        Evaluator ev(net);
        double worst = 0;
        std::size_t wrong = 0;
        for (std::size_t j = 0; j < inst.J(); ++j) {
            std::vector<Scalar> x;
            for (const auto& c : inst.x[j]) x.push_back(Scalar(c).to(net.kind()));
            const auto y = ev(x)[0];
            const mpq_class want(static_cast<unsigned long>(inst.y[j][0]));
            if (exact) {
                if (y.to_rational() != want) ++wrong;
            } else {
                const double e = std::abs(mpq_class(y.to_rational() - want).get_d());
                worst = std::max(worst, e);
                if (!(e <= kBigfloatRecallTol)) ++wrong;
            }
        }
        const double log_b = std::log2(rep.size.max_magnitude.to_double());
        const bool size_ok = rep.size.width <= kMemWidthConst * rep.budget_width &&
                             rep.size.depth <= kMemDepthConst * rep.budget_depth &&
                             log_b <= kMemLogMagConst * std::log2(rep.budget_magnitude);
        pass = pass && wrong == 0 && size_ok && exact == divides;
        detail << fmt("(N,L)=(%zu,%zu) %s: %zu/64 wrong, max err %.1e, width %zu/%.0f depth %zu/%.1f log2B %.1f/%.1f; ",
                      m.N, m.L, net.kind().name().c_str(), wrong, worst, rep.size.width, rep.budget_width,
                      rep.size.depth, rep.budget_depth, log_b, std::log2(rep.budget_magnitude));
    }
    return {pass, detail.str() + fmt("s+r = 24+8, constants width %gx depth %gx log2B %gx", kMemWidthConst,
                                     kMemDepthConst, kMemLogMagConst)};
}

// ---------------------------------------------------------------- 4
mpq_class floor_over(const mpq_class& x, long K) {
    if (x <= 0) return 0;
    if (x >= 1) return q(K - 1, K);
    mpq_class t = x * K;
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    return mpq_class(f) / K;
}

Outcome step_snap() {
    std::size_t checked = 0, bad = 0;
    for (long K : {2L, 3L, 5L, 8L, 16L, 31L, 64L, 100L, 127L, 256L, 500L, 1000L, 1024L}) {
        Evaluator ev(step_net(static_cast<std::size_t>(K), 8, 4, 1));
        for (long j = 0; j < K; ++j) {
            const mpq_class mid = q(2 * j + 1, 2 * K);
            ++checked;
            if (ev({Scalar(mid)})[0].to_rational() != floor_over(mid, K)) ++bad;
        }
    }
    std::mt19937_64 rng(404);
    for (long K : {16L, 1024L}) {
        const mpq_class gap = q(1, 4 * K);
        Evaluator ev(grid_snap_net(static_cast<std::size_t>(K), 2, 8, 4, gap));
        std::uniform_int_distribution<long> cell(0, K - 1);
        for (int t = 0; t < 500; ++t) {
            const mpq_class x = q(2 * cell(rng) + 1, 2 * K), y = q(2 * cell(rng) + 1, 2 * K);
            const auto out = ev({Scalar(x), Scalar(y)});
            ++checked;
            if (out[0].to_rational() != floor_over(x, K) || out[1].to_rational() != floor_over(y, K)) ++bad;
        }
    }
    return {bad == 0, fmt("%zu plateau midpoints (step K <= 1024, snap K in {16, 1024}), %zu inexact", checked, bad)};
}

// ---------------------------------------------------------------- 5
// f = sum_i f_i(x_i) with random Lipschitz pwl f_i; g agrees with f up to eps off the bands and takes
// arbitrary values inside them.
Outcome median_smoothing() {
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> Dd(1, 3), Kd(2, 6), slope(-8, 8), spike(-1000, 1000), pert(-4, 4);
    std::size_t points = 0, bad = 0;
    double worst_ratio = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        const std::size_t D = static_cast<std::size_t>(Dd(rng));
        const long K = Kd(rng);
        const mpq_class delta = q(1, 3 * K + static_cast<long>(rng() % (3 * K)));
        const mpq_class eps = q(1, 100);
        const mpq_class h = q(1, 8 * K);
        std::vector<std::vector<std::pair<mpq_class, mpq_class>>> f(D);
        std::vector<Network> gs;
        mpq_class lip = 0;
        for (std::size_t i = 0; i < D; ++i) {
            // f_i on knots -1, -1 + h, ..., 2 with slopes in [-2, 2].
            mpq_class y = q(spike(rng), 1000);
            for (mpq_class x = -1; x <= 2; x += h) {
                f[i].push_back({x, y});
                const mpq_class s = q(slope(rng), 4);
                lip = std::max<mpq_class>(lip, abs(s));
                y += s * h;
            }
            std::vector<std::pair<mpq_class, mpq_class>> g;
            for (std::size_t m = 0; m < f[i].size(); ++m) {
                const auto& [x, fy] = f[i][m];
                // Knots strictly inside a band are replaced by spikes below.
                bool inside = false;
                for (long k = 1; k < K; ++k) inside = inside || (x > q(k, K) - delta && x < q(k, K));
                if (!inside) g.push_back({x, fy + eps / static_cast<long>(D) * q(pert(rng), 4)});
            }
            for (long k = 1; k < K; ++k) {
                const mpq_class lo = q(k, K) - delta, hi = q(k, K);
                for (const mpq_class& x : {lo, hi}) {
                    const auto fy = oracle::interpolate(f[i], x);
                    g.push_back({x, fy + eps / static_cast<long>(D) * q(pert(rng), 4)});
                }
                g.push_back({lo + delta / 3, mpq_class(spike(rng))});
                g.push_back({lo + 2 * delta / 3, mpq_class(spike(rng))});
            }
            std::sort(g.begin(), g.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
            g.erase(std::unique(g.begin(), g.end(), [](const auto& u, const auto& v) { return u.first == v.first; }),
                    g.end());
            PwlSpec spec;
            for (const auto& [x, y] : g) spec.points.push_back({Scalar(x), Scalar(y)});
            gs.push_back(pwl_net(spec));
        }
        std::vector<std::vector<Scalar>> ones(1, std::vector<Scalar>(D, Scalar(mpq_class(1))));
        Network gsum = compose(affine_net(ones, {Scalar(mpq_class(0))}), direct_sum(gs));
        Network Mg = median_smooth(gsum, SmoothingConfig{static_cast<std::size_t>(K), Scalar(delta), D});
        Evaluator ev(Mg);
        const mpq_class bound = eps + mpq_class(static_cast<long>(D)) * lip * delta * (1 + mpq_class(kMedianSlack));
        std::uniform_int_distribution<long> u(0, 4096 * K);
        for (int p = 0; p < 40; ++p) {
            std::vector<mpq_class> x(D);
            for (auto& c : x) c = q(u(rng), 4096 * K);
            if (p % 2 == 1) {  // force a coordinate into a band
                const std::size_t i = rng() % D;
                const long k = 1 + static_cast<long>(rng() % static_cast<unsigned long>(K - 1));
                x[i] = q(k, K) - delta * q(1 + static_cast<long>(rng() % 999), 1000);
            }
            std::vector<Scalar> xs(x.begin(), x.end());
            mpq_class fx = 0;
            for (std::size_t i = 0; i < D; ++i) fx += oracle::interpolate(f[i], x[i]);
            const mpq_class err = abs(ev(xs)[0].to_rational() - fx);
            worst_ratio = std::max(worst_ratio, mpq_class(err / bound).get_d());
            ++points;
            if (err > bound) ++bad;
        }
    }
    return {bad == 0, fmt("%d targets, %zu points (half forced into bands), %zu violations, max |M_g - f| / bound %.3f",
                          trials, points, bad, worst_ratio)};
}

// ---------------------------------------------------------------- 6
Outcome monomial_bound_check() {
    std::ostringstream detail;
    bool pass = true;
    struct Budget {
        std::size_t N, L;
    };
    for (const MultiIndex& alpha : std::vector<MultiIndex>{{2}, {3}, {1, 1}, {2, 1}}) {
        const int k = std::accumulate(alpha.begin(), alpha.end(), 0);
        for (const auto& b : {Budget{1, 1}, Budget{2, 1}, Budget{1, 2}}) {
            Network net = monomial_net(alpha, b.N, b.L);
            std::vector<std::vector<double>> grid;
            if (alpha.size() == 1)
                for (int i = 0; i <= 10000; ++i) grid.push_back({i / 10000.0});
            else
                for (int i = 0; i < 100; ++i)
                    for (int j = 0; j < 100; ++j) grid.push_back({i / 99.0, j / 99.0});
            const auto out = Evaluator(net).eval_batch(grid);
            double err = 0;
            for (std::size_t n = 0; n < grid.size(); ++n) {
                double want = 1;
                for (std::size_t i = 0; i < alpha.size(); ++i) want *= std::pow(grid[n][i], alpha[i]);
                err = std::max(err, std::abs(out[n][0] - want));
            }
            const double bound = 9.0 * k * std::pow(static_cast<double>(b.N + 1), -7.0 * k * static_cast<double>(b.L));
            pass = pass && err <= bound;
            detail << fmt("a=(%d%s) N=%zu L=%zu err %.2e <= %.2e; ", alpha[0],
                          alpha.size() > 1 ? fmt(",%d", alpha[1]).c_str() : "", b.N, b.L, err, bound);
        }
    }
    return {pass, detail.str()};
}

// ---------------------------------------------------------------- 7
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

Outcome holder_rate() {
    struct Budget {
        std::size_t N, L;
    };
    const std::vector<Budget> budgets{{1, 1}, {2, 1}, {4, 1}, {8, 2}};  // NL = 1 .. 16
    std::ostringstream detail;
    bool pass = true;
    for (double s : {1.0, 2.0}) {
        const auto t = make_target({{"target", "sin-curve"}, {"s", s}});
        HolderOptions o;
        o.discovery_samples = 100000;
        o.eval_samples = 300;
        std::vector<double> lx, ly;
        for (const auto& b : budgets) {
            const auto r = holder_approx_net(t, b.N, b.L, o);
            lx.push_back(std::log(static_cast<double>(b.N * b.L)));
            ly.push_back(std::log(r.report.measured_sup_error));
        }
        const double slope = fit_slope(lx, ly), e = -2 * s / 1.0;
        const bool ok = slope >= kRateLo * e && slope <= kRateHi * e;
        pass = pass && ok;
        detail << fmt("s=%g slope %.2f in [%.2f, %.2f] (errors", s, slope, kRateLo * e, kRateHi * e);
        for (double v : ly) detail << fmt(" %.2e", std::exp(v));
        detail << "); ";
    }
    return {pass, detail.str()};
}

// ---------------------------------------------------------------- 8
Outcome error_propagation() {
    std::mt19937_64 rng(808);
    std::size_t bad = 0;
    double worst = 0;
    const int sims = 500;
    for (int t = 0; t < sims; ++t) {
        const auto sim = oracle::simulate_lipschitz_composition(rng);
        // Telescoped bound computed here from the definition.
        double bound = 0;
        for (std::size_t i = 0; i < sim.levels; ++i)
            bound += std::pow(sim.C, static_cast<double>(sim.levels - 1 - i)) *
                     *std::max_element(sim.eps[i].begin(), sim.eps[i].end());
        const double lib = propagate_errors(sim.levels, sim.C, sim.eps).telescoped;
        worst = std::max(worst, sim.max_gap / bound);
        if (sim.max_gap > bound * (1 + kPropagationRelTol) || std::abs(lib - bound) > 1e-12 * bound) ++bad;
    }
    return {bad == 0, fmt("%d simulations, %zu violations, max gap / bound %.3f", sims, bad, worst)};
}

// ---------------------------------------------------------------- 9
Outcome enlargement_covering() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t bad = 0;
    double worst = 0;
    const int clouds = 50;
    for (int t = 0; t < clouds; ++t) {
        const int m = 1 + t % 5;
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned long>(m));  // intrinsic dimension
        std::vector<std::vector<double>> A(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(k)));
        for (auto& row : A)
            for (auto& a : row) a = u(rng) - 0.5;
        PointCloud a, plus;
        for (int n = 0; n < 300; ++n) {
            std::vector<double> z(static_cast<std::size_t>(k)), x(static_cast<std::size_t>(m));
            for (auto& v : z) v = u(rng);
            for (int i = 0; i < m; ++i) {
                x[static_cast<std::size_t>(i)] = 0.5;
                for (int j = 0; j < k; ++j)
                    x[static_cast<std::size_t>(i)] += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                                                      z[static_cast<std::size_t>(j)];
            }
            a.points.push_back(x);
        }
        const double eta = 0.05 + 0.15 * u(rng), eps = eta * (0.2 + 1.8 * u(rng));
        plus.points = a.points;
        for (const auto& x : a.points)
            for (int r = 0; r < 3; ++r) {
                auto y = x;
                for (auto& c : y) c += eps * (2 * u(rng) - 1);
                plus.points.push_back(y);
            }
        const double base = static_cast<double>(greedy_cover(a, eta).count);
        const double big = static_cast<double>(greedy_cover(plus, eta).count);
        const double bound = std::pow(4.0, m) * base * std::pow(1 + eps / eta, m);
        worst = std::max(worst, big / (base * std::pow(1 + eps / eta, m)));
        if (big > bound) ++bad;
    }
    return {bad == 0, fmt("%d clouds (m <= 5), %zu violations, recorded constant 4^m, max observed ratio %.2f", clouds,
                          bad, worst)};
}

// ---------------------------------------------------------------- 10
Outcome compositional_xy() {
    auto spec = builtin_model("xy");
    CompositionalOptions o;
    o.N = 2;
    o.L = 2;
    o.holder.discovery_samples = 100000;
    o.holder.eval_samples = 200;
    o.domain_samples = 5000;
    o.measure_samples = 200;
    const auto r = compositional_net(spec, kXyTarget, o);
    std::vector<std::vector<double>> grid;
    for (int a = 0; a <= 40; ++a)
        for (int b = 0; b <= 40; ++b) grid.push_back({a / 40.0, b / 40.0});
    const auto out = Evaluator(r.net).eval_batch(grid);
    double err = 0;
    for (std::size_t n = 0; n < grid.size(); ++n) err = std::max(err, std::abs(out[n][0] - grid[n][0] * grid[n][1]));
    bool sched = r.report.schedule.delta.size() == 2;
    for (std::size_t i = 0; sched && i < 2; ++i) sched = r.report.schedule.delta[i] <= r.report.schedule.eps_level[i + 2];
    return {err <= kXyTarget && sched,
            fmt("41x41 grid sup error %.2e (<= %.2g), delta = (%.2e, %.2e) vs eps_2 %.2e eps_3 %.2e, budget (N,L)=(2,2)",
                err, kXyTarget, r.report.schedule.delta[0], r.report.schedule.delta[1],
                r.report.schedule.eps_level[2], r.report.schedule.eps_level[3])};
}

// ---------------------------------------------------------------- 11
Outcome erm_rate() {
    RegressionConfig cfg;
    cfg.target = make_target({{"target", "sin-curve"}, {"s", 1}});
    cfg.sigma = 0.1;
    cfg.trials = 5;
    const auto r = rate_experiment(cfg);
    const bool certified = std::all_of(r.rows.begin(), r.rows.end(), [](const auto& t) { return t.benchmark_loss >= 0; });
    return {r.pass && certified,
            fmt("slope %.3f in [%.3f, %.3f], %zu trials, %zu suboptimal, benchmark loss recorded for all: %s", r.slope,
                r.band_lo, r.band_hi, r.rows.size(), r.suboptimal_trials, certified ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    bool slow = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--slow") {
            slow = true;
        } else if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string item; std::getline(ss, item, ',');) only.insert(std::stoi(item));
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N[,M...]] [--slow]\n");
            return 2;
        }
    }
    const std::vector<Criterion> all{
        {1, "combinator algebra", 30, false, combinator_algebra},
        {2, "bit codec round trip", 30, false, bit_codec},
        {3, "memorization J=64 D=4", 60, false, memorization},
        {4, "step/snap exactness", 30, false, step_snap},
        {5, "median smoothing", 60, false, median_smoothing},
        {6, "monomial bound", 60, false, monomial_bound_check},
        {7, "Holder rate on a curve", 300, false, holder_rate},
        {8, "error propagation", 30, false, error_propagation},
        {9, "enlargement covering", 60, false, enlargement_covering},
        {10, "compositional xy", 120, false, compositional_xy},
        {11, "ERM rate (slow)", 1800, true, erm_rate},
    };
    int failures = 0;
    for (const auto& c : all) {
        if (only.empty() ? (c.slow && !slow) : !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        while (o.detail.size() >= 2 && o.detail.compare(o.detail.size() - 2, 2, "; ") == 0) o.detail.resize(o.detail.size() - 2);
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = sec <= c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("criterion %d: %s %s (%s; %.1fs of %.0fs%s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), sec, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
