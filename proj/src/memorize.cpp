#include "relusynth/memorize.hpp"

#include "relusynth/bitcodec.hpp"
#include "relusynth/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace relusynth {

namespace {

mpq_class sup_dist(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
    mpq_class d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max<mpq_class>(d, abs(a[i] - b[i]));
    return d;
}

// Smallest integer e with 2^e >= q (q > 0).
long ceil_log2(const mpq_class& q) {
    long e = static_cast<long>(std::floor(std::log2(q.get_d()))) - 2;
    while (pow2q(e) < q) ++e;
    return e;
}

mpq_class floor_dyadic(const mpq_class& x, int bits) {
    mpq_class t = x * pow2q(bits);
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    return mpq_class(f) * pow2q(-bits);
}

std::vector<Scalar> zeros(std::size_t n, const ScalarKind& k) { return std::vector<Scalar>(n, Scalar::zero(k)); }

// (x, xh, tu, (yh_a, tw_a)_a, acc_a) -> (x, tu, tw_a, acc_a + xi_a), depth 2.
Network gate_net(int s, std::size_t q) {
    const ScalarKind k = ScalarKind::rational();
    const Network bump = bump_net(s, k);
    const Layer& b0 = bump.layers()[0];
    const Layer& b1 = bump.layers()[1];
    const std::size_t nb = b0.W.rows();
    const std::size_t in = 3 + 3 * q;
    auto col_yh = [&](std::size_t a) { return 3 + 2 * a; };
    auto col_tw = [&](std::size_t a) { return 4 + 2 * a; };
    auto col_acc = [&](std::size_t a) { return 3 + 2 * q + a; };

    // Layer 1: bump ramps, x pair, tu, yh_a, tw_a, acc_a.
    const std::size_t h_x = nb, h_tu = nb + 2;
    auto h_yh = [&](std::size_t a) { return nb + 3 + 3 * a; };
    auto h_tw = [&](std::size_t a) { return nb + 4 + 3 * a; };
    auto h_acc = [&](std::size_t a) { return nb + 5 + 3 * a; };
    const std::size_t H1 = nb + 3 + 3 * q;
    Matrix::Builder w0(H1, in, k);
    std::vector<Scalar> v0 = zeros(H1, k);
    for (std::size_t r = 0; r < nb; ++r) {
        Scalar w = b0.W.at(r, 0);
        w0.add(r, 0, w);
        w0.add(r, 1, -w);
        v0[r] = b0.v[r];
    }
    w0.add(h_x, 0, 1);
    w0.add(h_x + 1, 0, -1);
    w0.add(h_tu, 2, 1);
    for (std::size_t a = 0; a < q; ++a) {
        w0.add(h_yh(a), col_yh(a), 1);
        w0.add(h_tw(a), col_tw(a), 1);
        w0.add(h_acc(a), col_acc(a), 1);
    }

    // Layer 2: xi_a, x pair, tu, tw_a, acc_a.
    const Scalar two_s(pow2q(-s));
    const std::size_t g_x = q, g_tu = q + 2;
    auto g_tw = [&](std::size_t a) { return q + 3 + 2 * a; };
    auto g_acc = [&](std::size_t a) { return q + 4 + 2 * a; };
    const std::size_t H2 = q + 3 + 2 * q;
    Matrix::Builder w1(H2, H1, k);
    std::vector<Scalar> v1 = zeros(H2, k);
    for (std::size_t a = 0; a < q; ++a) {
        w1.add(a, h_yh(a), two_s);
        for (const auto& e : b1.W.row(0)) w1.add(a, e.col, e.value);
        v1[a] = b1.v[0] - two_s;
        w1.add(g_tw(a), h_tw(a), 1);
        w1.add(g_acc(a), h_acc(a), 1);
    }
    w1.add(g_x, h_x, 1);
    w1.add(g_x, h_x + 1, -1);
    w1.add(g_x + 1, h_x, -1);
    w1.add(g_x + 1, h_x + 1, 1);
    w1.add(g_tu, h_tu, 1);

    // Output: x, tu, tw_a, acc_a + xi_a.
    const std::size_t out = 2 + 2 * q;
    Matrix::Builder w2(out, H2, k);
    w2.add(0, g_x, 1);
    w2.add(0, g_x + 1, -1);
    w2.add(1, g_tu, 1);
    for (std::size_t a = 0; a < q; ++a) {
        w2.add(2 + a, g_tw(a), 1);
        w2.add(2 + q + a, g_acc(a), 1);
        w2.add(2 + q + a, a, 1);
    }
    std::vector<Layer> layers;
    layers.push_back({w0.build(), std::move(v0)});
    layers.push_back({w1.build(), std::move(v1)});
    layers.push_back({w2.build(), zeros(out, k)});
    return Network(k, std::move(layers));
}

// (x, u, w_a, acc_a) -> (x, tail u, tail w_a, acc_a + gated label_a).
Network decode_step(std::size_t n, int c, int s, std::size_t q) {
    const ScalarKind k = ScalarKind::rational();
    Network dec = bit_decode_net(n, static_cast<std::size_t>(c), k);
    std::vector<Network> parts;
    parts.push_back(affine_net(Matrix::identity(1, k), zeros(1, k)));
    for (std::size_t a = 0; a <= q; ++a) parts.push_back(dec);
    parts.push_back(affine_net(Matrix::identity(q, k), zeros(q, k)));
    return compose(gate_net(s, q), direct_sum(parts));
}

}  // namespace

std::size_t memorize_n(std::size_t N) {
    std::size_t n = 0, p = 3;
    while (p <= N) {
        ++n;
        p *= 3;
    }
    return std::max<std::size_t>(n, 1);
}

std::size_t memorize_L_prime(std::size_t N, std::size_t L) {
    double n = static_cast<double>(memorize_n(N));
    double lg = std::log2(std::max<double>(2.0, static_cast<double>(N * L)));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(L) * std::sqrt(n / lg) - 1e-12)));
}

int memorize_bits(int c, std::size_t L_prime, int s, int r) {
    double need = std::ceil(c * static_cast<double>(L_prime) * std::log2(3.0)) + s + r + 96;
    int bits = std::max(256, static_cast<int>(need));
    return (bits + 63) / 64 * 64;
}

void validate(const MemorizationInstance& inst) {
    if (inst.r < 1 || inst.r > 62) throw std::invalid_argument("memorize: r must lie in [1, 62]");
    if (inst.x.empty()) throw std::invalid_argument("memorize: empty instance");
    if (inst.y.size() != inst.x.size()) throw std::invalid_argument("memorize: label count differs from point count");
    if (!(inst.delta > 0)) throw std::invalid_argument("memorize: delta must be positive");
    const std::size_t D = inst.D(), q = inst.outputs();
    for (std::size_t j = 0; j < inst.J(); ++j) {
        if (inst.x[j].size() != D || D == 0) throw std::invalid_argument("memorize: inconsistent point dimension");
        for (const auto& c : inst.x[j])
            if (c < 0 || c > 1) throw std::invalid_argument("memorize: point outside [0,1]^D");
        if (inst.y[j].size() != q || q == 0) throw std::invalid_argument("memorize: inconsistent label width");
        for (auto lab : inst.y[j])
            if (lab >= (std::uint64_t{1} << inst.r)) throw std::invalid_argument("memorize: label outside {0, ..., 2^r - 1}");
    }
    for (std::size_t i = 0; i < inst.J(); ++i)
        for (std::size_t j = i + 1; j < inst.J(); ++j)
            if (sup_dist(inst.x[i], inst.x[j]) < inst.delta)
                throw std::invalid_argument("memorize: points closer than delta (duplicate point?)");
}

ProjectionResult separating_direction(const std::vector<std::vector<mpq_class>>& points, const mpq_class& delta,
                                      std::size_t max_tries, std::uint64_t seed) {
    if (points.empty()) throw std::invalid_argument("separating_direction: no points");
    const std::size_t J = points.size(), D = points[0].size();
    ProjectionResult res;
    res.R = mpq_class(2 * static_cast<long>(J * J * D)) / delta;
    if (max_tries == 0) max_tries = std::max<std::size_t>(10 * J * J, 10);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const mpq_class need = 1 / res.R;
    for (std::size_t t = 1; t <= max_tries; ++t) {
        std::vector<double> u(D);
        double norm = 0;
        for (auto& c : u) {
            c = gauss(rng);
            norm += c * c;
        }
        norm = std::sqrt(norm);
        if (norm == 0) continue;
        for (auto& c : u) c /= norm;
        std::vector<mpq_class> ut;
        for (double c : u) ut.emplace_back(c / std::sqrt(static_cast<double>(D)));
        std::vector<mpq_class> proj;
        bool ok = true;
        for (const auto& x : points) {
            mpq_class p = 0;
            for (std::size_t i = 0; i < D; ++i) p += ut[i] * x[i];
            if (abs(p) > 1 || p == 1) ok = false;
            proj.push_back(p);
        }
        if (!ok) continue;
        std::sort(proj.begin(), proj.end());
        mpq_class gap = J > 1 ? proj[1] - proj[0] : mpq_class(1);
        for (std::size_t i = 1; i < J; ++i) gap = std::min<mpq_class>(gap, proj[i] - proj[i - 1]);
        if (gap >= need) {
            res.u = u;
            res.u_tilde = ut;
            res.achieved_gap = gap;
            res.tries = t;
            return res;
        }
    }
    throw ProjectionError("separating_direction: no separating direction found within max_tries");
}

Network memorize_1d(const std::vector<mpq_class>& xs_in, const std::vector<std::vector<std::uint64_t>>& labels_in, int r,
                    std::size_t N, std::size_t L, int s, const MemorizeOptions& opt, MemorizeReport* report) {
    const std::size_t J = xs_in.size();
    if (J == 0 || labels_in.size() != J) throw std::invalid_argument("memorize_1d: empty input or label mismatch");
    if (N < 1 || L < 1 || s < 1 || r < 1 || r > 62) throw std::invalid_argument("memorize_1d: bad parameters");
    if (J > N * N * L * L) throw std::invalid_argument("memorize_1d: budget too small, need J <= N^2 L^2");
    const std::size_t q = labels_in[0].size();
    if (q == 0) throw std::invalid_argument("memorize_1d: empty label vector");

    std::vector<std::size_t> order(J);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs_in[a] < xs_in[b]; });
    std::vector<mpq_class> xs;
    std::vector<std::vector<std::uint64_t>> ys;
    for (auto i : order) {
        if (xs_in[i] < 0 || xs_in[i] >= 1) throw std::invalid_argument("memorize_1d: x outside [0, 1)");
        if (labels_in[i].size() != q) throw std::invalid_argument("memorize_1d: ragged labels");
        for (auto lab : labels_in[i])
            if (lab >= (std::uint64_t{1} << r)) throw std::invalid_argument("memorize_1d: label outside {0, ..., 2^r - 1}");
        xs.push_back(xs_in[i]);
        ys.push_back(labels_in[i]);
    }
    for (std::size_t j = 1; j < J; ++j)
        if (xs[j] - xs[j - 1] < pow2q(-s)) throw std::invalid_argument("memorize_1d: separation 2^-s violated");

    const std::size_t n = memorize_n(N), Lp = memorize_L_prime(N, L);
    const std::size_t M = (J + Lp - 1) / Lp;
    const int sp = s + 2, c = std::max(r, sp);

    // Codes per interval; padded slots carry zero digits and zero labels.
    PwlMultiSpec spec;
    spec.values.resize(1 + q);
    auto slot_x = [&](std::size_t j) { return j < J ? floor_dyadic(xs[j], sp) : mpq_class(0); };
    auto slot_y = [&](std::size_t j, std::size_t a) {
        return j < J ? mpq_class(static_cast<unsigned long>(ys[j][a])) * pow2q(-r) : mpq_class(0);
    };
    const mpq_class margin = pow2q(-(s + 2)), half = pow2q(-(s + 3));
    for (std::size_t m = 0; m < M; ++m) {
        std::vector<mpq_class> xh;
        std::vector<std::vector<mpq_class>> yv(q);
        for (std::size_t j = m * Lp; j < (m + 1) * Lp; ++j) {
            xh.push_back(slot_x(j));
            for (std::size_t a = 0; a < q; ++a) yv[a].push_back(slot_y(j, a));
        }
        std::vector<Scalar> codes{Scalar(block_encode(xh, static_cast<std::size_t>(c)).value)};
        for (std::size_t a = 0; a < q; ++a) codes.push_back(Scalar(block_encode(yv[a], static_cast<std::size_t>(c)).value));
        const mpq_class& first = xs[m * Lp];
        const mpq_class& last = xs[std::min((m + 1) * Lp, J) - 1];
        mpq_class left = m == 0 ? mpq_class(first - margin) : mpq_class((xs[m * Lp - 1] + first) / 2 + half);
        mpq_class right = m + 1 == M ? mpq_class(last + margin) : mpq_class((last + xs[(m + 1) * Lp]) / 2 - half);
        spec.xs.push_back(Scalar(left));
        spec.xs.push_back(Scalar(right));
        for (std::size_t o = 0; o <= q; ++o) {
            spec.values[o].push_back(codes[o]);
            spec.values[o].push_back(codes[o]);
        }
    }

    const ScalarKind rat = ScalarKind::rational();
    const std::size_t min_cap = 3 + 2 * (1 + q) + 1;
    Network front;
    if (opt.pwl_width_cap == SIZE_MAX) {
        front = parallelize(identity_net(1, rat), pwl_net(spec, rat));
    } else {
        std::size_t cap = opt.pwl_width_cap ? opt.pwl_width_cap : N;
        front = pwl_net_chained(spec, std::max(cap, min_cap), true, rat);
    }
    // Append zero accumulators.
    {
        Matrix::Builder b(2 + 2 * q, 2 + q, rat);
        for (std::size_t i = 0; i < 2 + q; ++i) b.add(i, i, 1);
        front = compose(affine_net(b.build(), zeros(2 + 2 * q, rat)), front);
    }
    Network step = decode_step(n, c, s, q);
    Network net = front;
    for (std::size_t k = 0; k < Lp; ++k) net = compose(step, net);

    // Keep the accumulators and undo the 2^-(s+r) scale.
    std::vector<std::size_t> acc_idx;
    for (std::size_t a = 0; a < q; ++a) acc_idx.push_back(2 + q + a);
    net = compose(projection_net(2 + 2 * q, acc_idx, rat), net);

    ScalarKind kind;
    if (opt.kind) {
        kind = *opt.kind;
    } else if ((s + r) % static_cast<long>(L) == 0) {
        kind = rat;
    } else {
        kind = ScalarKind::bigfloat(memorize_bits(c, Lp, s, r));
    }
    Network rho = scaling_chain(s + r, L, kind);
    std::vector<Network> rhos(q, rho);
    net = compose(direct_sum(rhos), net.to(kind));

    if (report) {
        report->J = J;
        report->n = n;
        report->L_prime = Lp;
        report->M = M;
        report->s = s;
        report->s_prime = sp;
        report->c = c;
        report->r = r;
        report->kind = kind;
        report->size = size_report(net);
        const double lgL = std::log2(static_cast<double>(L)), lgN = std::log2(std::max<double>(2.0, static_cast<double>(N)));
        const double lgNL = std::log2(std::max<double>(2.0, static_cast<double>(N * L)));
        report->budget_width = static_cast<double>(N);
        report->budget_depth = static_cast<double>(L) +
                               static_cast<double>(L) * (std::sqrt(lgL) + (s + r) / std::sqrt(lgNL)) / std::sqrt(lgN);
        report->budget_magnitude = static_cast<double>(N) + std::exp2(static_cast<double>(s + r) / static_cast<double>(L));
    }
    return net;
}

Network memorize_nd(const MemorizationInstance& inst, std::size_t N, std::size_t L, const MemorizeOptions& opt,
                    MemorizeReport* report) {
    validate(inst);
    const std::size_t J = inst.J(), D = inst.D();
    if (J > N * N * L * L) throw std::invalid_argument("memorize_nd: budget too small, need J <= N^2 L^2");
    ProjectionResult proj = separating_direction(inst.x, inst.delta, opt.max_tries, opt.seed);
    // z = 1/2 + u~^T x / 2; gap of z is at least 1/(2R) >= 2^-s.
    const long lgR = ceil_log2(proj.R);
    const int s = static_cast<int>(std::max<long>(1, lgR + 1));
    std::vector<mpq_class> z;
    for (const auto& x : inst.x) {
        mpq_class p = 0;
        for (std::size_t i = 0; i < D; ++i) p += proj.u_tilde[i] * x[i];
        z.push_back(mpq_class(1, 2) + p / 2);
    }
    const ScalarKind rat = ScalarKind::rational();
    Matrix::Builder A(1, D, rat);
    for (std::size_t i = 0; i < D; ++i) A.add(0, i, Scalar(mpq_class(proj.u_tilde[i] / 2)));
    Network phi_z = affine_net(A.build(), {Scalar(mpq_class(1, 2))});
    Network mem = memorize_1d(z, inst.y, inst.r, N, L, s, opt, report);
    Network net = compose(mem, phi_z.to(mem.kind()));
    if (report) {
        report->size = size_report(net);
        report->projection_tries = proj.tries;
        // B = N + 2^((r + log R) / L)
        report->budget_magnitude = static_cast<double>(N) +
                                   std::exp2((inst.r + std::log2(proj.R.get_d())) / static_cast<double>(L));
    }
    return net;
}

}  // namespace relusynth
