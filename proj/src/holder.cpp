#include "relusynth/holder.hpp"

#include "relusynth/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace relusynth {

namespace {

const ScalarKind RAT = ScalarKind::rational();

std::vector<Scalar> zeros(std::size_t n) { return std::vector<Scalar>(n, Scalar(0)); }

Network affine(std::size_t rows, std::size_t cols, const std::vector<std::tuple<std::size_t, std::size_t, mpq_class>>& e,
               std::vector<Scalar> b = {}) {
    Matrix::Builder m(rows, cols, RAT);
    for (const auto& [i, j, v] : e) m.add(i, j, Scalar(v));
    if (b.empty()) b = zeros(rows);
    return affine_net(m.build(), b);
}

// Staircase on Kp plateaus: k/Kp on [k/Kp, (k+1)/Kp - gap].
PwlMultiSpec staircase(std::size_t Kp, const mpq_class& gap) {
    PwlMultiSpec spec;
    spec.values.resize(1);
    const long K = static_cast<long>(Kp);
    for (long k = 0; k + 1 < K; ++k) {
        mpq_class edge = mpq_class(k + 1) / K;
        spec.xs.push_back(Scalar(mpq_class(edge - gap)));
        spec.values[0].push_back(Scalar(mpq_class(mpq_class(k) / K)));
        spec.xs.push_back(Scalar(edge));
        spec.values[0].push_back(Scalar(edge));
    }
    return spec;
}

std::size_t nearest_divisor(std::size_t K) {
    std::size_t best = 1;
    const double root = std::sqrt(static_cast<double>(K));
    for (std::size_t a = 1; a * a <= K; ++a)
        if (K % a == 0 && std::abs(static_cast<double>(a) - root) < std::abs(static_cast<double>(best) - root)) best = a;
    return best;
}

// z -> approximately z^2 on [0,1] with error (b^-2m)/4; input clamped first.
Network square_net(std::size_t b, std::size_t m) {
    // Clamp: c = relu(z) - relu(z - 1), emitted twice as (x, acc).
    Network net = [&] {
        Matrix::Builder w0(2, 1, RAT), w1(2, 2, RAT);
        w0.add(0, 0, 1);
        w0.add(1, 0, 1);
        for (std::size_t i = 0; i < 2; ++i) {
            w1.add(i, 0, 1);
            w1.add(i, 1, -1);
        }
        std::vector<Layer> layers;
        layers.push_back({w0.build(), {Scalar(0), Scalar(-1)}});
        layers.push_back({w1.build(), zeros(2)});
        return Network(RAT, std::move(layers));
    }();
    const long B = static_cast<long>(b);
    // Node values of the fold Z and of the interpolated y(1 - y) on the grid j/b.
    std::vector<mpq_class> zv(b + 1), ev(b + 1);
    for (long j = 0; j <= B; ++j) {
        zv[j] = j % 2;
        mpq_class y = mpq_class(j) / B;
        ev[j] = y * (1 - y);
    }
    auto ramp_coefs = [&](const std::vector<mpq_class>& vals) {
        std::vector<mpq_class> c(b);
        mpq_class prev = 0;
        for (long j = 0; j < B; ++j) {
            mpq_class slope = (vals[j + 1] - vals[j]) * B;
            c[j] = slope - prev;
            prev = slope;
        }
        return c;
    };
    const auto cz = ramp_coefs(zv), ce = ramp_coefs(ev);
    mpq_class scale = 1;
    for (std::size_t i = 0; i < m; ++i) {
        Matrix::Builder w0(b + 1, 2, RAT), w1(2, b + 1, RAT);
        std::vector<Scalar> v0 = zeros(b + 1);
        for (long j = 0; j < B; ++j) {
            w0.add(j, 0, 1);
            v0[j] = Scalar(mpq_class(mpq_class(-j) / B));
            w1.add(0, j, Scalar(cz[j]));
            w1.add(1, j, Scalar(mpq_class(-scale * ce[j])));
        }
        w0.add(b, 1, 1);
        w1.add(1, b, 1);
        std::vector<Layer> layers;
        layers.push_back({w0.build(), std::move(v0)});
        layers.push_back({w1.build(), zeros(2)});
        net = compose(Network(RAT, std::move(layers)), net);
        scale /= B * B;
    }
    return compose(projection_net(2, {1}, RAT), net);
}

std::vector<double> normalize(const HolderTarget& t, const std::vector<double>& x) {
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = (x[i] - t.lo_at(i)) / (t.hi_at(i) - t.lo_at(i));
    return u;
}

// Candidate cell indices per coordinate for u_i + {-shift, 0, shift}, restricted to [0,1].
std::vector<std::vector<long>> shifted_cells(const std::vector<double>& u, std::size_t K, double shift) {
    std::vector<std::vector<long>> opts(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (double t : {-shift, 0.0, shift}) {
            double v = u[i] + t;
            if (v < 0 || v > 1) continue;
            long c = std::min(static_cast<long>(std::floor(v * static_cast<double>(K))), static_cast<long>(K) - 1);
            if (std::find(opts[i].begin(), opts[i].end(), c) == opts[i].end()) opts[i].push_back(c);
        }
    }
    return opts;
}

template <class F>
void for_each_product(const std::vector<std::vector<long>>& opts, F&& fn) {
    std::vector<long> cur(opts.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == opts.size()) {
            fn(cur);
            return;
        }
        for (long c : opts[i]) {
            cur[i] = c;
            rec(i + 1);
        }
    };
    rec(0);
}

mpq_class exact(double v) { return mpq_class(v); }

}  // namespace

int HolderTarget::order() const { return static_cast<int>(std::floor(s + 1e-12)); }

std::vector<MultiIndex> multi_indices(std::size_t D, int k) {
    std::vector<MultiIndex> out;
    for (int g = 0; g <= k; ++g) {
        MultiIndex a(D, 0);
        std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
            if (i + 1 == D) {
                a[i] = left;
                out.push_back(a);
                return;
            }
            for (int v = left; v >= 0; --v) {
                a[i] = v;
                rec(i + 1, left - v);
            }
        };
        if (D > 0) rec(0, g);
    }
    return out;
}

double factorial(const MultiIndex& a) {
    double f = 1;
    for (int v : a)
        for (int i = 2; i <= v; ++i) f *= i;
    return f;
}

std::function<double(const MultiIndex&, const std::vector<double>&)> finite_difference_partials(
    std::function<double(const std::vector<double>&)> f) {
    auto self = std::make_shared<std::function<double(const MultiIndex&, const std::vector<double>&)>>();
    *self = [f, w = std::weak_ptr(self)](const MultiIndex& a, const std::vector<double>& x) -> double {
        auto i = std::find_if(a.begin(), a.end(), [](int v) { return v > 0; });
        if (i == a.end()) return f(x);
        auto me = w.lock();
        const std::size_t k = static_cast<std::size_t>(i - a.begin());
        const double h = 1e-5;
        MultiIndex lower = a;
        --lower[k];
        std::vector<double> xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        return ((*me)(lower, xp) - (*me)(lower, xm)) / (2 * h);
    };
    // The closure keeps the shared state alive through a copy held by the caller.
    return [self](const MultiIndex& a, const std::vector<double>& x) { return (*self)(a, x); };
}

void validate(const HolderTarget& t, std::size_t probes, std::uint64_t seed, double tol) {
    if (t.D == 0) throw std::invalid_argument("target: D must be positive");
    if (!t.f || !t.partial || !t.sampler) throw std::invalid_argument("target: missing oracle");
    if (!(t.s > 0)) throw std::invalid_argument("target: smoothness must be positive");
    if (!(t.C > 0)) throw std::invalid_argument("target: scale C must be positive");
    if ((!t.lo.empty() && t.lo.size() != t.D) || (!t.hi.empty() && t.hi.size() != t.D))
        throw std::invalid_argument("target: box dimension mismatch");
    for (std::size_t i = 0; i < t.D; ++i)
        if (!(t.hi_at(i) > t.lo_at(i))) throw std::invalid_argument("target: empty box");
    std::mt19937_64 rng(seed);
    const auto alphas = multi_indices(t.D, t.order());
    const double h = 1e-5;
    for (std::size_t p = 0; p < probes; ++p) {
        std::vector<double> x = t.sampler(rng);
        if (x.size() != t.D) throw std::invalid_argument("target: sampler dimension mismatch");
        double f0 = t.f(x), p0 = t.partial(MultiIndex(t.D, 0), x);
        if (std::abs(f0 - p0) > tol * std::max(1.0, std::abs(f0)))
            throw std::invalid_argument("target '" + t.name + "': zeroth partial differs from f");
        for (const auto& a : alphas) {
            auto it = std::find_if(a.begin(), a.end(), [](int v) { return v > 0; });
            if (it == a.end()) continue;
            const std::size_t k = static_cast<std::size_t>(it - a.begin());
            MultiIndex lower = a;
            --lower[k];
            std::vector<double> xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            double fd = (t.partial(lower, xp) - t.partial(lower, xm)) / (2 * h);
            double an = t.partial(a, x);
            if (std::abs(fd - an) > tol * std::max(1.0, std::abs(an)))
                throw std::invalid_argument("target '" + t.name + "': derivative oracle inconsistent with f");
        }
    }
}

bool GridPartition::contains(const std::vector<long>& beta) const {
    return std::binary_search(occupied.begin(), occupied.end(), beta);
}

GridPartition discover_cells(const HolderTarget& t, std::size_t K, double shift, std::size_t samples,
                             std::uint64_t seed) {
    if (K == 0) throw std::invalid_argument("discover_cells: K must be positive");
    const double cap = std::pow(static_cast<double>(K), static_cast<double>(t.D));
    if (cap > 9.0e18) throw std::invalid_argument("discover_cells: K^D too large");
    GridPartition g;
    g.K = K;
    g.D = t.D;
    std::unordered_set<std::uint64_t> keys;
    std::mt19937_64 rng(seed);
    for (std::size_t n = 0; n < samples; ++n) {
        std::vector<double> u = normalize(t, t.sampler(rng));
        for (double v : u)
            if (!(v >= -1e-12 && v <= 1 + 1e-12)) throw std::invalid_argument("discover_cells: sample outside the box");
        for (double& v : u) v = std::clamp(v, 0.0, 1.0);
        for_each_product(shifted_cells(u, K, shift), [&](const std::vector<long>& b) {
            std::uint64_t key = 0;
            for (std::size_t i = t.D; i-- > 0;) key = key * K + static_cast<std::uint64_t>(b[i]);
            keys.insert(key);
        });
    }
    for (std::uint64_t key : keys) {
        std::vector<long> b(t.D);
        for (std::size_t i = 0; i < t.D; ++i) {
            b[i] = static_cast<long>(key % K);
            key /= K;
        }
        g.occupied.push_back(std::move(b));
    }
    std::sort(g.occupied.begin(), g.occupied.end());
    return g;
}

Network step_net_with_gap(std::size_t K, const mpq_class& gap, std::size_t N, std::size_t L) {
    if (K == 0 || N == 0 || L == 0) throw std::invalid_argument("step_net: K, N, L must be positive");
    if (K > N * N * L * L) throw std::invalid_argument("step_net: K exceeds N^2 L^2");
    if (!(gap > 0) || gap * static_cast<long>(K) >= 1) throw std::invalid_argument("step_net: gap must lie in (0, 1/K)");
    if (K == 1) return affine(1, 1, {});
    const std::size_t cap = std::max<std::size_t>(N, 5);
    const std::size_t K1 = nearest_divisor(K), K2 = K / K1;
    if (K1 == 1) return pwl_net_chained(staircase(K, gap), cap, false, RAT);
    // x -> (x, psi1(x)); then psi1 + psi2(K1 (x - psi1)) / K1.
    Network coarse = pwl_net_chained(staircase(K1, gap), cap, true, RAT);
    const long k1 = static_cast<long>(K1);
    Network fine = compose(pwl_net_chained(staircase(K2, gap * k1), cap, false, RAT),
                           affine(1, 2, {{0, 0, mpq_class(k1)}, {0, 1, mpq_class(-k1)}}));
    Network both = parallelize(projection_net(2, {1}, RAT), fine);
    Network sum = affine(1, 2, {{0, 0, mpq_class(1)}, {0, 1, mpq_class(1, k1)}});
    return compose(sum, compose(both, coarse));
}

Network step_net(std::size_t K, std::size_t N, std::size_t L, int r) {
    if (r < 1) throw std::invalid_argument("step_net: r must be at least 1");
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), K, static_cast<unsigned long>(r));
    return step_net_with_gap(K, mpq_class(1) / mpq_class(4 * p), N, L);
}

Network grid_snap_net(std::size_t K, std::size_t D, std::size_t N, std::size_t L, const mpq_class& gap) {
    if (D == 0) throw std::invalid_argument("grid_snap_net: D must be positive");
    Network step = step_net_with_gap(K, gap, N, L);
    std::vector<Network> parts;
    for (std::size_t i = 0; i < D; ++i) parts.push_back(compose(step, projection_net(D, {i}, RAT)));
    return parallelize(parts);
}

Network product_net(std::size_t N, std::size_t stages) {
    Network sq = square_net(N + 1, stages);
    std::vector<Network> parts{compose(sq, affine(1, 2, {{0, 0, mpq_class(1, 2)}, {0, 1, mpq_class(1, 2)}})),
                               compose(sq, projection_net(2, {0}, RAT)), compose(sq, projection_net(2, {1}, RAT))};
    // xy = 2((x+y)/2)^2 - x^2/2 - y^2/2
    return compose(affine(1, 3, {{0, 0, mpq_class(2)}, {0, 1, mpq_class(-1, 2)}, {0, 2, mpq_class(-1, 2)}}),
                   parallelize(parts));
}

double monomial_bound(const MultiIndex& alpha, std::size_t N, std::size_t L) {
    const int k = std::accumulate(alpha.begin(), alpha.end(), 0);
    if (k <= 1) return 0;
    return 9.0 * k * std::pow(static_cast<double>(N + 1), -7.0 * k * static_cast<double>(L));
}

Network monomial_net(const MultiIndex& alpha, std::size_t N, std::size_t L) {
    const std::size_t D = alpha.size();
    if (D == 0 || N == 0 || L == 0) throw std::invalid_argument("monomial_net: empty alpha or zero budget");
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < D; ++i) {
        if (alpha[i] < 0) throw std::invalid_argument("monomial_net: negative exponent");
        for (int e = 0; e < alpha[i]; ++e) vars.push_back(i);
    }
    const std::size_t k = vars.size();
    if (k == 0) return affine(1, D, {}, {Scalar(1)});
    if (k == 1) return projection_net(D, vars, RAT);
    const std::size_t m = (7 * k * L + 1) / 2;
    Network prod = product_net(N, m);
    Network net = projection_net(D, vars, RAT);
    for (std::size_t j = 1; j < k; ++j) {
        const std::size_t rest = k - 1 - j;
        Network stage = rest == 0 ? prod : direct_sum(prod, identity_net(rest, RAT));
        net = compose(stage, net);
    }
    return net;
}

std::map<std::vector<long>, std::vector<double>> taylor_coeffs(const HolderTarget& t, const GridPartition& grid,
                                                               const std::vector<MultiIndex>& alphas) {
    if (!t.partial) throw std::invalid_argument("taylor_coeffs: derivative oracle missing");
    std::map<std::vector<long>, std::vector<double>> out;
    for (const auto& beta : grid.occupied) {
        std::vector<double> x(t.D);
        for (std::size_t i = 0; i < t.D; ++i)
            x[i] = t.lo_at(i) + (t.hi_at(i) - t.lo_at(i)) * static_cast<double>(beta[i]) / static_cast<double>(grid.K);
        std::vector<double> xi;
        for (const auto& a : alphas) xi.push_back(t.partial(a, x) / factorial(a));
        out.emplace(beta, std::move(xi));
    }
    return out;
}

double quantize(double xi, int r) { return std::ldexp(std::floor(std::ldexp(xi, r)), -r); }

double measure_sup_error(const Network& net, const HolderTarget& t, const GridPartition* grid, double shift,
                         std::size_t samples, std::uint64_t seed, unsigned threads, std::size_t* used,
                         std::size_t* skipped) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> pts;
    std::size_t skip = 0;
    for (std::size_t n = 0; n < samples; ++n) {
        std::vector<double> x = t.sampler(rng);
        if (grid) {
            std::vector<double> u = normalize(t, x);
            for (double& v : u) v = std::clamp(v, 0.0, 1.0);
            bool ok = true;
            for_each_product(shifted_cells(u, grid->K, shift), [&](const std::vector<long>& b) {
                if (!grid->contains(b)) ok = false;
            });
            if (!ok) {
                ++skip;
                continue;
            }
        }
        pts.push_back(std::move(x));
    }
    Evaluator ev(net);
    auto out = ev.eval_batch(pts, threads);
    double err = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, std::abs(out[i][0] - t.f(pts[i])));
    if (used) *used = pts.size();
    if (skipped) *skipped = skip;
    return err;
}

HolderResult holder_approx_net(const HolderTarget& t, std::size_t N, std::size_t L, const HolderOptions& opt) {
    validate(t, 4, opt.seed);
    if (N == 0 || L == 0) throw std::invalid_argument("holder_approx_net: N and L must be positive");
    const std::size_t D = t.D;
    HolderResult res;
    ApproxReport& rep = res.report;
    rep.N = N;
    rep.L = L;
    rep.D = D;
    rep.s = t.s;
    rep.C = t.C;
    rep.d = opt.d > 0 ? opt.d : (t.d > 0 ? t.d : static_cast<double>(D));
    const double NL2 = static_cast<double>(N * N * L * L);
    std::size_t K = opt.K;
    if (K == 0) K = static_cast<std::size_t>(std::ceil(std::pow(NL2, 1.0 / rep.d) - 1e-9));
    K = std::clamp<std::size_t>(K, 1, N * N * L * L);
    rep.K = K;
    rep.eps = std::pow(static_cast<double>(K), -t.s);
    if (opt.eps > 0) rep.eps = std::min(rep.eps, opt.eps / t.C);
    rep.bound = t.C * std::pow(static_cast<double>(N * L), -2.0 * t.s / rep.d);
    // Band width: a power of two at most min(eps/4, 1/(3K)).
    const double dmax = std::min(rep.eps / 4, 1.0 / (3.0 * static_cast<double>(K)));
    const long de = static_cast<long>(std::ceil(-std::log2(dmax)));
    const mpq_class delta = pow2q(-de);
    rep.delta = delta.get_d();

    GridPartition grid = discover_cells(t, K, rep.delta, opt.discovery_samples, opt.seed);
    rep.cells = grid.occupied.size();

    // Unit-scale coefficients eta = d^alpha (f/C)(x_beta) / alpha! * K^-|alpha| in normalized coordinates.
    const auto all = multi_indices(D, t.order());
    auto xi = taylor_coeffs(t, grid, all);
    std::vector<double> unit(all.size());
    for (std::size_t a = 0; a < all.size(); ++a) {
        double u = 1.0 / t.C;
        for (std::size_t i = 0; i < D; ++i)
            u *= std::pow((t.hi_at(i) - t.lo_at(i)) / static_cast<double>(K), all[a][i]);
        unit[a] = u;
    }
    std::vector<std::size_t> kept;
    for (std::size_t a = 0; a < all.size(); ++a) {
        double mx = 0;
        for (const auto& [beta, c] : xi) mx = std::max(mx, std::abs(c[a] * unit[a]));
        if (mx > 0) {
            kept.push_back(a);
            rep.alphas.push_back(all[a]);
            rep.alpha_scales.push_back(std::exp2(std::ceil(std::log2(mx))));
        }
    }
    const std::size_t q = kept.size();
    const ScalarKind out_kind_default = ScalarKind::bigfloat(256);

    // Normalization x -> u and output scale C.
    Matrix::Builder nb(D, D, RAT);
    std::vector<Scalar> nbias;
    for (std::size_t i = 0; i < D; ++i) {
        mpq_class w = 1 / (exact(t.hi_at(i)) - exact(t.lo_at(i)));
        nb.add(i, i, Scalar(w));
        nbias.push_back(Scalar(mpq_class(-exact(t.lo_at(i)) * w)));
    }
    Network norm = affine_net(nb.build(), nbias);

    if (q == 0) {
        res.net = compose(affine(1, D, {}), norm).to(out_kind_default);
        rep.size = size_report(res.net);
        if (opt.measure)
            rep.measured_sup_error = measure_sup_error(res.net, t, &grid, rep.delta, opt.eval_samples, opt.seed + 1,
                                                       opt.threads, &rep.eval_points, &rep.eval_skipped);
        return res;
    }

    int r = 1;
    for (double S : rep.alpha_scales)
        r = std::max(r, static_cast<int>(std::ceil(std::log2(2.0 * S * static_cast<double>(q) / rep.eps))));
    if (r > 62) throw std::invalid_argument("holder_approx_net: coefficient precision exceeds 62 bits");
    rep.r = r;

    MemorizationInstance inst;
    inst.r = r;
    inst.delta = mpq_class(1) / static_cast<long>(K);
    const long double two_r = std::ldexp(1.0L, r);
    const std::uint64_t ymax = (std::uint64_t{1} << r) - 1;
    for (const auto& [beta, c] : xi) {
        std::vector<mpq_class> x;
        for (long b : beta) x.push_back(mpq_class(b) / static_cast<long>(K));
        inst.x.push_back(std::move(x));
        std::vector<std::uint64_t> y;
        for (std::size_t j = 0; j < q; ++j) {
            long double eta = static_cast<long double>(c[kept[j]]) * unit[kept[j]] / rep.alpha_scales[j];
            long double v = std::floor(two_r * (eta + 1) / 2);
            y.push_back(static_cast<std::uint64_t>(std::clamp<long double>(v, 0, static_cast<long double>(ymax))));
        }
        inst.y.push_back(std::move(y));
    }
    const std::size_t J = inst.J();
    std::size_t Nm = std::max<std::size_t>(N, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(J)) / L)));
    while (Nm * Nm * L * L < J) ++Nm;
    rep.N_memorize = Nm;
    MemorizeOptions mopt;
    mopt.pwl_width_cap = SIZE_MAX;
    mopt.seed = opt.seed;
    Network mem = memorize_nd(inst, Nm, L, mopt, &rep.memorize);
    rep.memorize_size = size_report(mem);
    const ScalarKind kind =
        mem.kind().tag == ScalarKind::Tag::bigfloat
            ? mem.kind()
            : ScalarKind::bigfloat(memorize_bits(rep.memorize.c, rep.memorize.L_prime, rep.memorize.s, rep.memorize.r));

    // u -> (t, x_beta) with t = K (u - x_beta).
    Network snap = grid_snap_net(K, D, N, L, delta);
    rep.snap_size = size_report(snap);
    Network front = parallelize(identity_net(D, RAT), snap);
    {
        std::vector<std::tuple<std::size_t, std::size_t, mpq_class>> e;
        const long k = static_cast<long>(K);
        for (std::size_t i = 0; i < D; ++i) {
            e.emplace_back(i, i, mpq_class(k));
            e.emplace_back(i, D + i, mpq_class(-k));
            e.emplace_back(D + i, D + i, mpq_class(1));
        }
        front = compose(affine(2 * D, 2 * D, e), front);
    }
    // (t, x_beta) -> (m_alpha for alpha != 0, y_alpha for all kept alpha)
    std::vector<std::size_t> nonconst;
    for (std::size_t j = 0; j < q; ++j)
        if (std::accumulate(rep.alphas[j].begin(), rep.alphas[j].end(), 0) > 0) nonconst.push_back(j);
    Network middle = mem;
    if (!nonconst.empty()) {
        std::vector<Network> monos;
        for (std::size_t j : nonconst) monos.push_back(monomial_net(rep.alphas[j], N, L));
        middle = direct_sum(parallelize(monos), mem);
    } else {
        middle = compose(mem, projection_net(2 * D, [&] {
                             std::vector<std::size_t> idx;
                             for (std::size_t i = 0; i < D; ++i) idx.push_back(D + i);
                             return idx;
                         }(), RAT));
    }
    Network inner = compose(middle, front);

    // Per-alpha gates on (m, y) or y alone; output sum of S (2 p m - m), p = y 2^-r.
    const std::size_t nm = nonconst.size();
    const mpq_class inv_r = pow2q(-r);
    Network prod = product_net(N, 7 * L);
    std::vector<Network> gates;
    std::vector<std::size_t> order;  // input positions in `inner` output for each gate input
    std::size_t mono_pos = 0;
    for (std::size_t j = 0; j < q; ++j) {
        mpq_class S(rep.alpha_scales[j]);
        const std::size_t ypos = nm + j;
        if (mono_pos < nm && nonconst[mono_pos] == j) {
            Network g = compose(prod, affine(2, 2, {{0, 1, inv_r}, {1, 0, mpq_class(1)}}));
            g = parallelize(g, projection_net(2, {0}, RAT));
            gates.push_back(compose(affine(1, 2, {{0, 0, mpq_class(2 * S)}, {0, 1, mpq_class(-S)}}), g));
            order.push_back(mono_pos);
            order.push_back(ypos);
            ++mono_pos;
        } else {
            gates.push_back(affine(1, 1, {{0, 0, mpq_class(2 * S * inv_r)}}, {Scalar(mpq_class(-S))}));
            order.push_back(ypos);
        }
    }
    Network gate = direct_sum(gates);
    std::vector<std::tuple<std::size_t, std::size_t, mpq_class>> ones;
    for (std::size_t j = 0; j < q; ++j) ones.emplace_back(0, j, mpq_class(1));
    inner = compose(affine(1, q, ones), compose(gate, compose(projection_net(nm + q, order, RAT), inner)));
    rep.inner_size = size_report(inner);

    SmoothingConfig sc;
    sc.K = K;
    sc.delta = Scalar(delta);
    sc.D = D;
    Network smooth = median_smooth(inner.to(kind), sc);
    mpq_class C = exact(t.C);
    res.net = compose(affine(1, 1, {{0, 0, C}}).to(kind), compose(smooth, norm.to(kind)));
    rep.size = size_report(res.net);
    if (opt.measure)
        rep.measured_sup_error = measure_sup_error(res.net, t, &grid, rep.delta, opt.eval_samples, opt.seed + 1,
                                                   opt.threads, &rep.eval_points, &rep.eval_skipped);
    return res;
}

nlohmann::json ApproxReport::to_json() const {
    nlohmann::json j;
    j["N"] = N;
    j["L"] = L;
    j["K"] = K;
    j["D"] = D;
    j["d"] = d;
    j["s"] = s;
    j["C"] = C;
    j["eps"] = eps;
    j["delta"] = delta;
    j["r"] = r;
    j["cells"] = cells;
    j["N_memorize"] = N_memorize;
    j["alphas"] = alphas;
    j["alpha_scales"] = alpha_scales;
    auto sz = [](const SizeReport& s) {
        return nlohmann::json{{"width", s.width},
                              {"depth", s.depth},
                              {"B", s.max_magnitude.to_double()},
                              {"params", s.param_count},
                              {"nonzeros", s.nonzero_count}};
    };
    j["size"] = sz(size);
    j["components"] = {{"snap", sz(snap_size)}, {"memorize", sz(memorize_size)}, {"inner", sz(inner_size)}};
    j["memorize"] = {{"J", memorize.J},   {"n", memorize.n}, {"L_prime", memorize.L_prime},
                     {"s", memorize.s},   {"c", memorize.c}, {"kind", memorize.kind.name()},
                     {"tries", memorize.projection_tries}};
    j["eval_points"] = eval_points;
    j["eval_skipped"] = eval_skipped;
    j["measured_sup_error"] = measured_sup_error;
    j["bound"] = bound;
    return j;
}

std::string ApproxReport::csv_header() { return "N,L,K,measured_sup_error,bound,width,depth,B"; }

std::string ApproxReport::csv_row() const {
    std::ostringstream o;
    o.precision(17);
    o << N << ',' << L << ',' << K << ',' << measured_sup_error << ',' << bound << ',' << size.width << ','
      << size.depth << ',' << size.max_magnitude.to_double();
    return o.str();
}

}  // namespace relusynth
