#include "relusynth/compositional.hpp"

#include "relusynth/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace relusynth {

namespace {

int degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

std::vector<double> restrict_to(const std::vector<double>& x, const std::vector<std::size_t>& S) {
    std::vector<double> z(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) z[k] = x[S[k]];
    return z;
}

std::string tag(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

using Sampler = std::function<std::vector<double>(std::mt19937_64&)>;

Sampler cube(std::size_t D) {
    return [D](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0, 1);
        std::vector<double> x(D);
        for (auto& v : x) v = u(rng);
        return x;
    };
}

Sampler curve(double amp) {
    return [amp](std::mt19937_64& rng) {
        const double t = std::uniform_real_distribution<double>(0, 1)(rng);
        const double w = 2 * std::numbers::pi * t;
        return std::vector<double>{t, 0.5 + amp * std::sin(w), 0.5 + amp * std::cos(w)};
    };
}

std::function<double(const MultiIndex&, const std::vector<double>&)> partials_of(const Component& c) {
    if (c.partial) return c.partial;
    // Central differences in the S coordinates of the full input.
    auto S = c.S;
    auto g = c.g;
    auto h = finite_difference_partials([S, g](const std::vector<double>& z) {
        std::vector<double> x(*std::max_element(S.begin(), S.end()) + 1, 0.0);
        for (std::size_t k = 0; k < S.size(); ++k) x[S[k]] = z[k];
        return g(x);
    });
    return [S, h](const MultiIndex& a, const std::vector<double>& x) { return h(a, restrict_to(x, S)); };
}

}  // namespace

std::vector<std::size_t> CompositionalSpec::dims() const {
    std::vector<std::size_t> d{D};
    for (const auto& lv : levels) d.push_back(lv.size());
    return d;
}

std::vector<double> CompositionalSpec::apply(const std::vector<double>& x, std::size_t k) const {
    std::vector<double> z = x;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> nz(levels[i].size());
        for (std::size_t j = 0; j < levels[i].size(); ++j) nz[j] = levels[i][j].g(z);
        z = std::move(nz);
    }
    return z;
}

nlohmann::json ModelDiagnostics::to_json() const {
    nlohmann::json j;
    j["ok"] = ok;
    j["violations"] = violations;
    for (const auto& e : components)
        j["components"].push_back({{"level", e.i},
                                   {"index", e.j},
                                   {"max_abs", e.max_abs},
                                   {"max_derivative", e.max_derivative},
                                   {"holder_quotient", e.holder_quotient},
                                   {"minkowski_slope", e.slope},
                                   {"sparsity_change", e.sparsity_change}});
    return j;
}

ModelDiagnostics validate_model(const CompositionalSpec& spec, std::size_t probes, std::uint64_t seed, double tol,
                                double dim_tol) {
    ModelDiagnostics diag;
    auto fail = [&](const std::string& msg) {
        diag.ok = false;
        diag.violations.push_back(msg);
    };
    if (spec.D == 0) fail("input dimension must be positive");
    if (!(spec.C > 0)) fail("C must be positive");
    const auto dims = spec.dims();
    if (spec.levels.empty() && spec.D != 1) fail("a model without levels must have one input");
    if (!spec.levels.empty() && dims.back() != 1) fail("the last level must have one component");
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        if (spec.levels[i].empty()) fail("level " + std::to_string(i + 1) + " is empty");
        for (std::size_t j = 0; j < spec.levels[i].size(); ++j) {
            const auto& c = spec.levels[i][j];
            const std::string at = tag(i + 1, j + 1);
            std::set<std::size_t> uniq(c.S.begin(), c.S.end());
            if (c.S.empty() || uniq.size() != c.S.size()) fail(at + ": S must be a non-empty set");
            for (auto k : c.S)
                if (k >= dims[i]) fail(at + ": S index " + std::to_string(k) + " out of range");
            if (!(c.s >= 1)) fail(at + ": smoothness must be >= 1");
            if (!(c.d > 0)) fail(at + ": intrinsic dimension must be positive");
            if (!c.g) fail(at + ": missing function oracle");
        }
    }
    if (!spec.levels.empty() && !spec.sampler) fail("missing domain sampler");
    if (!diag.ok || spec.levels.empty()) return diag;

    std::mt19937_64 rng(seed);
    const std::size_t cloud_n = std::max<std::size_t>(probes, 3000);
    std::vector<std::vector<double>> xs(cloud_n);
    for (auto& x : xs) x = spec.sampler(rng);

    std::vector<std::vector<double>> z = xs;  // G_{i-1}(x)
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        for (std::size_t j = 0; j < spec.levels[i].size(); ++j) {
            const auto& c = spec.levels[i][j];
            const std::string at = tag(i + 1, j + 1);
            ModelDiagnostics::Entry e;
            e.i = i + 1;
            e.j = j + 1;
            const auto part = partials_of(c);
            const double dtol = c.partial ? tol : std::max(tol, 1e-3);
            const int k = static_cast<int>(std::floor(c.s + 1e-12));
            const double frac = c.s - k;
            const auto alphas = multi_indices(c.S.size(), k);
            std::uniform_real_distribution<double> wide(-spec.C, spec.C);
            std::uniform_real_distribution<double> step(1e-3, 1e-1);
            for (std::size_t p = 0; p < std::min(probes, z.size()); ++p) {
                const auto& x = z[p];
                const double v = c.g(x);
                e.max_abs = std::max(e.max_abs, std::abs(v));
                // (C): coordinates outside S must not matter.
                if (c.S.size() < x.size()) {
                    auto y = x;
                    for (std::size_t q = 0; q < y.size(); ++q)
                        if (std::find(c.S.begin(), c.S.end(), q) == c.S.end()) y[q] = wide(rng);
                    e.sparsity_change = std::max(e.sparsity_change, std::abs(c.g(y) - v));
                }
                // (S): derivative bounds, and the Holder quotient of the top derivatives.
                for (const auto& a : alphas) {
                    const double da = part(a, x);
                    if (degree(a) > 0) e.max_derivative = std::max(e.max_derivative, std::abs(da));
                    if (degree(a) == k && frac > 0) {
                        auto y = x;
                        double dist = 0;
                        for (auto q : c.S) {
                            const double hq = step(rng) * (rng() & 1 ? 1 : -1);
                            y[q] += hq;
                            dist = std::max(dist, std::abs(hq));
                        }
                        e.holder_quotient =
                            std::max(e.holder_quotient, std::abs(part(a, y) - da) / std::pow(dist, frac));
                    }
                }
            }
            if (e.sparsity_change > tol * (1 + e.max_abs))
                fail(at + " [C]: output changes by " + std::to_string(e.sparsity_change) + " off S");
            if (e.max_abs > spec.C * (1 + tol)) fail(at + " [S]: |g| reaches " + std::to_string(e.max_abs) + " > C");
            if (e.max_derivative > spec.C * (1 + dtol))
                fail(at + " [S]: derivative reaches " + std::to_string(e.max_derivative) + " > C");
            if (e.holder_quotient > spec.C * (1 + dtol))
                fail(at + " [S]: Holder quotient reaches " + std::to_string(e.holder_quotient) + " > C");
            // (M): covering slope of the projected input set.
            PointCloud cloud;
            for (const auto& x : z) cloud.points.push_back(restrict_to(x, c.S));
            e.slope = minkowski_slope(cloud, default_eps_grid(cloud, 8, 2.0)).slope;
            if (e.slope > c.d + dim_tol)
                fail(at + " [M]: covering slope " + std::to_string(e.slope) + " exceeds d = " + std::to_string(c.d));
            diag.components.push_back(e);
        }
        for (auto& x : z) {
            std::vector<double> nz(spec.levels[i].size());
            for (std::size_t j = 0; j < nz.size(); ++j) nz[j] = spec.levels[i][j].g(x);
            x = std::move(nz);
        }
    }
    return diag;
}

PropagationBound propagate_errors(std::size_t levels, double C, const std::vector<std::vector<double>>& eps) {
    if (eps.size() != levels) throw std::invalid_argument("propagate_errors: one row of errors per level");
    PropagationBound b;
    double overall = 0;
    for (std::size_t i = 1; i <= levels; ++i) {
        double m = 0;
        for (double e : eps[i - 1]) {
            if (!(e >= 0)) throw std::invalid_argument("propagate_errors: errors must be non-negative");
            m = std::max(m, e);
        }
        overall = std::max(overall, m);
        b.telescoped += std::pow(C, static_cast<double>(levels - i)) * m;
    }
    if (levels > 0)
        b.coarse = static_cast<double>(levels) * std::max(std::pow(C, static_cast<double>(levels) - 1), 1.0) * overall;
    return b;
}

ErrorSchedule make_schedule(std::size_t levels, double C, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("schedule: eps must be positive");
    ErrorSchedule s;
    s.eps = eps;
    const double l = static_cast<double>(std::max<std::size_t>(levels, 1));
    s.eps0 = eps / (l * std::pow(C + 1, static_cast<double>(levels)));
    for (std::size_t i = 0; i <= levels + 1; ++i) s.eps_level.push_back(s.eps0 * std::pow(C + 1, static_cast<double>(i)));
    if (s.eps_level[levels] > 1)
        throw std::invalid_argument("schedule violation: eps_l = " + std::to_string(s.eps_level[levels]) + " > 1");
    return s;
}

nlohmann::json CompositionalReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["eps"] = eps;
    j["d_star"] = d_star;
    j["s_star"] = s_star;
    j["eps0"] = schedule.eps0;
    j["eps_level"] = schedule.eps_level;
    j["delta"] = schedule.delta;
    j["schedule_holds"] = schedule.holds;
    j["final_sup_error"] = final_sup_error;
    j["components_ok"] = components_ok;
    j["ok"] = ok;
    j["width"] = size.width;
    j["depth"] = size.depth;
    j["max_magnitude"] = size.max_magnitude.to_double();
    j["nonzero_count"] = size.nonzero_count;
    for (const auto& c : components) {
        nlohmann::json e = {{"level", c.i},         {"index", c.j},
                            {"lo", c.lo},           {"hi", c.hi},
                            {"target_eps", c.target_eps}, {"measured_error", c.measured_error}};
        e["holder"] = c.holder.to_json();
        j["components"].push_back(e);
    }
    return j;
}

std::string CompositionalReport::csv_header() {
    return "level,index,target_eps,measured_error,delta_level,eps_next,K,cells,width,depth";
}

std::string CompositionalReport::csv_rows() const {
    std::ostringstream o;
    o.precision(10);
    for (const auto& c : components) {
        const double dl = c.i <= schedule.delta.size() ? schedule.delta[c.i - 1] : -1;
        o << c.i << ',' << c.j << ',' << c.target_eps << ',' << c.measured_error << ',' << dl << ','
          << schedule.eps_level.at(c.i + 1) << ',' << c.holder.K << ',' << c.holder.cells << ','
          << c.holder.size.width << ',' << c.holder.size.depth << '\n';
    }
    return o.str();
}

CompositionalResult compositional_net(const CompositionalSpec& spec, double eps, const CompositionalOptions& opt) {
    auto diag = validate_model(spec, 200, opt.seed);
    if (!diag.ok) {
        std::string msg = "model validation failed:";
        for (const auto& v : diag.violations) msg += "\n  " + v;
        throw std::invalid_argument(msg);
    }
    const std::size_t l = spec.level_count();
    CompositionalResult res;
    auto& rep = res.report;
    rep.name = spec.name;
    rep.eps = eps;
    rep.schedule = make_schedule(l, spec.C, eps);
    if (l == 0) {
        res.net = identity_net(1);
        rep.size = size_report(res.net);
        rep.final_sup_error = 0;
        return res;
    }

    // (d*, s*) maximizes d/s; ties go to the smallest s.
    auto consider = [&](double d, double s) {
        const double cur = rep.s_star > 0 ? rep.d_star / rep.s_star : -1;
        const double v = d / s;
        if (v > cur + 1e-12 || (std::abs(v - cur) <= 1e-12 && s < rep.s_star)) {
            rep.d_star = d;
            rep.s_star = s;
        }
    };
    if (opt.include_level_zero) consider(spec.d0 > 0 ? spec.d0 : static_cast<double>(spec.D), spec.s0);
    for (const auto& lv : spec.levels)
        for (const auto& c : lv) consider(c.d, c.s);

    // Step 1: each component on a box around (M_ij)^{+eps_i}, accuracy eps_i.
    const auto dims = spec.dims();
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < spec.levels[i].size(); ++j) jobs.emplace_back(i, j);
    rep.components.resize(jobs.size());
    std::vector<Network> nets(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task; (task = next++) < jobs.size();) {
            try {
                const auto [i, j] = jobs[task];
                const auto& c = spec.levels[i][j];
                const double ei = rep.schedule.eps_level[i + 1];
                const std::uint64_t seed = opt.seed + 7919 * (i + 1) + 104729 * (j + 1);
                std::mt19937_64 rng(seed);
                const std::size_t m = c.S.size();
                std::vector<double> lo(m, 1e300), hi(m, -1e300);
                for (std::size_t n = 0; n < opt.domain_samples; ++n) {
                    const auto z = restrict_to(spec.apply(spec.sampler(rng), i), c.S);
                    for (std::size_t k = 0; k < m; ++k) {
                        lo[k] = std::min(lo[k], z[k]);
                        hi[k] = std::max(hi[k], z[k]);
                    }
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double pad = ei + 0.05 * (hi[k] - lo[k]) + 1e-6;
                    lo[k] -= pad;
                    hi[k] += pad;
                }
                HolderTarget t;
                t.name = c.name;
                t.D = m;
                t.s = c.s;
                t.C = spec.C;
                t.d = c.d;
                t.lo = lo;
                t.hi = hi;
                auto embed = [S = c.S, width = dims[i]](const std::vector<double>& z) {
                    std::vector<double> x(width, 0.0);
                    for (std::size_t k = 0; k < S.size(); ++k) x[S[k]] = z[k];
                    return x;
                };
                t.f = [g = c.g, embed](const std::vector<double>& z) { return g(embed(z)); };
                t.partial = [p = partials_of(c), embed](const MultiIndex& a, const std::vector<double>& z) {
                    return p(a, embed(z));
                };
                // Samples of (M_ij)^{+eps_i}: projected covariates plus uniform sup-ball jitter.
                t.sampler = [&spec, i, S = c.S, ei, lo, hi](std::mt19937_64& r) {
                    auto z = restrict_to(spec.apply(spec.sampler(r), i), S);
                    std::uniform_real_distribution<double> jit(-ei, ei);
                    for (std::size_t k = 0; k < z.size(); ++k) z[k] = std::clamp(z[k] + jit(r), lo[k], hi[k]);
                    return z;
                };
                HolderOptions ho = opt.holder;
                ho.eps = ei;
                ho.seed = seed;
                ho.d = c.d;
                ho.threads = 1;
                auto hr = holder_approx_net(t, opt.N, opt.L, ho);
                auto& cr = rep.components[task];
                cr.i = i + 1;
                cr.j = j + 1;
                cr.lo = lo;
                cr.hi = hi;
                cr.target_eps = ei;
                cr.measured_error = hr.report.measured_sup_error;
                cr.holder = std::move(hr.report);
                nets[task] = compose(hr.net, projection_net(dims[i], c.S));
            } catch (...) {
                errors[task] = std::current_exception();
            }
        }
    };
    {
        const unsigned n = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(jobs.size())));
        std::vector<std::thread> pool;
        for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (const auto& c : rep.components)
        if (c.measured_error > c.target_eps * (1 + opt.tol)) rep.components_ok = false;

    // Steps 2 and 3: parallelize each level and compose.
    std::vector<Network> level_nets;
    for (std::size_t i = 0, t = 0; i < l; ++i) {
        std::vector<Network> parts;
        for (std::size_t j = 0; j < spec.levels[i].size(); ++j) parts.push_back(nets[t++]);
        level_nets.push_back(parts.size() == 1 ? parts[0] : parallelize(parts));
    }
    res.net = level_nets[0];
    for (std::size_t i = 1; i < l; ++i) res.net = compose(level_nets[i], res.net);
    rep.size = size_report(res.net);

    // delta_i = sup over M samples of |G^_i - G_i|, level by level.
    std::mt19937_64 rng(opt.seed ^ 0x5bd1e995u);
    std::vector<std::vector<double>> xs(opt.measure_samples);
    for (auto& x : xs) x = spec.sampler(rng);
    std::vector<std::vector<double>> approx = xs;
    for (std::size_t i = 0; i < l; ++i) {
        approx = Evaluator(level_nets[i]).eval_batch(approx, opt.threads);
        double d = 0;
        for (std::size_t n = 0; n < xs.size(); ++n) {
            const auto exact = spec.apply(xs[n], i + 1);
            for (std::size_t k = 0; k < exact.size(); ++k) d = std::max(d, std::abs(approx[n][k] - exact[k]));
        }
        rep.schedule.delta.push_back(d);
        if (d > rep.schedule.eps_level[i + 2]) rep.schedule.holds = false;
    }
    // Final error of the assembled network on fresh samples.
    std::vector<std::vector<double>> ys(opt.measure_samples);
    for (auto& y : ys) y = spec.sampler(rng);
    const auto out = Evaluator(res.net).eval_batch(ys, opt.threads);
    rep.final_sup_error = 0;
    for (std::size_t n = 0; n < ys.size(); ++n)
        rep.final_sup_error = std::max(rep.final_sup_error, std::abs(out[n][0] - spec(ys[n])));
    rep.ok = rep.schedule.holds && rep.final_sup_error <= eps * (1 + opt.tol);
    return res;
}

// Builtins act on z = x_S.
Component make_component(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("component must be a JSON object");
    Component c;
    c.name = j.at("fn").get<std::string>();
    c.S = j.at("S").get<std::vector<std::size_t>>();
    if (c.S.empty()) throw std::invalid_argument("component S must be non-empty");
    c.s = j.value("s", 1.0);
    c.d = j.value("d", static_cast<double>(c.S.size()));
    const auto S = c.S;
    const std::size_t m = S.size();
    if (c.name == "linear") {
        const auto w = j.at("coeffs").get<std::vector<double>>();
        const double b = j.value("bias", 0.0);
        if (w.size() != m) throw std::invalid_argument("linear component: coeffs must match S");
        c.g = [S, w, b](const std::vector<double>& x) {
            double v = b;
            for (std::size_t k = 0; k < S.size(); ++k) v += w[k] * x[S[k]];
            return v;
        };
        c.partial = [g = c.g, w](const MultiIndex& a, const std::vector<double>& x) {
            const int k = degree(a);
            if (k == 0) return g(x);
            if (k > 1) return 0.0;
            for (std::size_t q = 0; q < a.size(); ++q)
                if (a[q]) return w[q];
            return 0.0;
        };
    } else if (c.name == "sum_square") {
        c.g = [S](const std::vector<double>& x) {
            double u = 0;
            for (auto k : S) u += x[k];
            return u * u;
        };
        c.partial = [S](const MultiIndex& a, const std::vector<double>& x) {
            double u = 0;
            for (auto k : S) u += x[k];
            switch (degree(a)) {
                case 0: return u * u;
                case 1: return 2 * u;
                case 2: return 2.0;
                default: return 0.0;
            }
        };
    } else if (c.name == "diff_square") {
        if (m != 2) throw std::invalid_argument("diff_square component needs |S| = 2");
        c.g = [S](const std::vector<double>& x) {
            const double u = x[S[0]] - x[S[1]];
            return u * u;
        };
        c.partial = [S](const MultiIndex& a, const std::vector<double>& x) {
            const double u = x[S[0]] - x[S[1]];
            const double sign = a[1] % 2 ? -1.0 : 1.0;
            switch (degree(a)) {
                case 0: return u * u;
                case 1: return sign * 2 * u;
                case 2: return sign * 2.0;
                default: return 0.0;
            }
        };
    } else if (c.name == "sin_linear") {
        const auto w = j.at("coeffs").get<std::vector<double>>();
        const double b = j.value("bias", 0.0);
        if (w.size() != m) throw std::invalid_argument("sin_linear component: coeffs must match S");
        auto arg = [S, w, b](const std::vector<double>& x) {
            double v = b;
            for (std::size_t k = 0; k < S.size(); ++k) v += w[k] * x[S[k]];
            return v;
        };
        c.g = [arg](const std::vector<double>& x) { return std::sin(arg(x)); };
        c.partial = [arg, w](const MultiIndex& a, const std::vector<double>& x) {
            double scale = 1;
            for (std::size_t q = 0; q < a.size(); ++q) scale *= std::pow(w[q], a[q]);
            return scale * std::sin(arg(x) + degree(a) * std::numbers::pi / 2);
        };
    } else if (c.name == "norm2") {
        c.g = [S](const std::vector<double>& x) {
            double v = 0;
            for (auto k : S) v += x[k] * x[k];
            return v;
        };
        c.partial = [S](const MultiIndex& a, const std::vector<double>& x) {
            const int k = degree(a);
            if (k == 0) {
                double v = 0;
                for (auto q : S) v += x[q] * x[q];
                return v;
            }
            for (std::size_t q = 0; q < a.size(); ++q) {
                if (!a[q]) continue;
                if (k == 1) return 2 * x[S[q]];
                if (k == 2 && a[q] == 2) return 2.0;
                return 0.0;
            }
            return 0.0;
        };
    } else {
        throw std::invalid_argument("unknown component function '" + c.name + "'");
    }
    return c;
}

std::vector<std::string> builtin_component_names() {
    return {"linear", "sum_square", "diff_square", "sin_linear", "norm2"};
}

CompositionalSpec make_spec(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("model spec must be a JSON object");
    if (j.contains("model")) return builtin_model(j.at("model").get<std::string>());
    CompositionalSpec s;
    s.name = j.value("name", std::string("custom"));
    s.D = j.at("input_dim").get<std::size_t>();
    s.C = j.value("C", 1.0);
    s.d0 = j.value("d0", 0.0);
    s.s0 = j.value("s0", 1.0);
    const auto dom = j.value("domain", nlohmann::json("cube"));
    const std::string type = dom.is_string() ? dom.get<std::string>() : dom.value("type", std::string("cube"));
    if (type == "cube") {
        s.sampler = cube(s.D);
    } else if (type == "curve") {
        if (s.D != 3) throw std::invalid_argument("curve domain needs input_dim 3");
        const double amp = dom.is_object() ? dom.value("amplitude", 0.15) : 0.15;
        if (!(amp > 0 && amp < 0.5)) throw std::invalid_argument("curve amplitude must lie in (0, 1/2)");
        s.sampler = curve(amp);
    } else {
        throw std::invalid_argument("unknown domain '" + type + "'");
    }
    for (const auto& lv : j.value("levels", nlohmann::json::array())) {
        std::vector<Component> level;
        for (const auto& c : lv) level.push_back(make_component(c));
        s.levels.push_back(std::move(level));
    }
    return s;
}

CompositionalSpec builtin_model(const std::string& name) {
    using nlohmann::json;
    if (name == "identity") {
        CompositionalSpec s;
        s.name = name;
        s.D = 1;
        s.sampler = cube(1);
        return s;
    }
    if (name == "xy") {
        // xy = ((x+y)^2 - (x-y)^2) / 4
        auto s = make_spec(json{{"name", "xy"},
                                {"input_dim", 2},
                                {"C", 4},
                                {"levels",
                                 {{{{"fn", "sum_square"}, {"S", {0, 1}}, {"s", 2}, {"d", 2}},
                                   {{"fn", "diff_square"}, {"S", {0, 1}}, {"s", 2}, {"d", 2}}},
                                  {{{"fn", "linear"}, {"S", {0, 1}}, {"coeffs", {0.25, -0.25}}, {"s", 2}, {"d", 2}}}}}});
        return s;
    }
    if (name == "sparse-aggregation") {
        // h(f_1(x_1, x_2), f_2(x_3, x_4)) with smooth bounded features.
        return make_spec(json{
            {"name", "sparse-aggregation"},
            {"input_dim", 4},
            {"C", 1},
            {"levels",
             {{{{"fn", "sin_linear"}, {"S", {0, 1}}, {"coeffs", {0.5, 0.5}}, {"s", 2}, {"d", 2}},
               {{"fn", "sin_linear"}, {"S", {2, 3}}, {"coeffs", {0.5, -0.5}}, {"bias", 0.3}, {"s", 2}, {"d", 2}}},
              {{{"fn", "linear"}, {"S", {0, 1}}, {"coeffs", {0.5, 0.5}}, {"s", 2}, {"d", 2}}}}}});
    }
    throw std::invalid_argument("unknown builtin model '" + name + "'");
}

}  // namespace relusynth
