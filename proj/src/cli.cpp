#include "relusynth/cli.hpp"

#include "relusynth/compositional.hpp"
#include "relusynth/ermlab.hpp"
#include "relusynth/geometry.hpp"
#include "relusynth/holder.hpp"
#include "relusynth/memorize.hpp"
#include "relusynth/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace relusynth::cli {

namespace {

using nlohmann::json;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssertionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string scalar;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    std::optional<ScalarKind> kind() const {
        if (scalar.empty()) return std::nullopt;
        return ScalarKind::parse(scalar);
    }
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

template <class F>
auto loading(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

Network read_network(const std::string& path) {
    return loading(path, [&] { return deserialize(read_json(path)); });
}

HolderTarget read_target(const std::string& path) {
    return loading(path, [&] { return make_target(read_json(path)); });
}

PointCloud read_cloud(const std::string& path) {
    return loading(path, [&] { return load_cloud(path); });
}

CompositionalSpec read_model(const std::string& name_or_path) {
    const auto names = {"identity", "xy", "sparse-aggregation"};
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_model(name_or_path);
    return loading(name_or_path, [&] { return make_spec(read_json(name_or_path)); });
}

// Exact rational from "p/q", an integer, or a decimal such as "0.375" or "1e-3".
mpq_class parse_rational(const std::string& s) {
    if (s.find_first_of(".eE") == std::string::npos) return Scalar::parse(s, ScalarKind::rational()).as_rational();
    std::string mant = s;
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mant = s.substr(0, e);
        exp10 = std::stol(s.substr(e + 1));
    }
    if (auto dot = mant.find('.'); dot != std::string::npos) {
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    mpz_class num;
    if (mant.empty() || mant == "-" || num.set_str(mant, 10) != 0) throw std::invalid_argument("unparsable number: " + s);
    mpz_class p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    mpq_class q = exp10 >= 0 ? mpq_class(num * p10) : mpq_class(num, p10);
    q.canonicalize();
    return q;
}

mpq_class json_rational(const json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return mpq_class(v.get<long>());
    if (v.is_number()) return mpq_class(v.get<double>());
    throw std::invalid_argument("expected a number or a rational string");
}

Scalar parse_in(const std::string& s, const ScalarKind& k) {
    if (k.tag == ScalarKind::Tag::rational) return Scalar(parse_rational(s));
    return Scalar::parse(s, k);
}

// Rationals print as "p/q", integers without a denominator.
std::string display(const Scalar& v) {
    if (v.kind().tag == ScalarKind::Tag::rational) return v.as_rational().get_str();
    return v.to_string();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);)
        if (!item.empty()) out.push_back(item);
    return out;
}

// {"points": [[...], ...] or [x, ...], "labels": [[...], ...] or [y, ...], "r": bits, "delta": optional}
MemorizationInstance read_instance(const std::string& path) {
    return loading(path, [&] {
        const json j = read_json(path);
        MemorizationInstance inst;
        for (const auto& p : j.at("points")) {
            std::vector<mpq_class> x;
            if (p.is_array())
                for (const auto& c : p) x.push_back(json_rational(c));
            else
                x.push_back(json_rational(p));
            inst.x.push_back(std::move(x));
        }
        for (const auto& l : j.at("labels")) {
            if (l.is_array())
                inst.y.push_back(l.get<std::vector<std::uint64_t>>());
            else
                inst.y.push_back({l.get<std::uint64_t>()});
        }
        inst.r = j.at("r").get<int>();
        if (j.contains("delta")) {
            inst.delta = json_rational(j.at("delta"));
        } else {
            bool first = true;
            for (std::size_t a = 0; a < inst.x.size(); ++a)
                for (std::size_t b = a + 1; b < inst.x.size(); ++b) {
                    mpq_class d = 0;
                    for (std::size_t k = 0; k < inst.x[a].size() && k < inst.x[b].size(); ++k)
                        d = std::max<mpq_class>(d, abs(inst.x[a][k] - inst.x[b][k]));
                    if (first || d < inst.delta) inst.delta = d;
                    first = false;
                }
            if (first) inst.delta = 1;
        }
        validate(inst);
        return inst;
    });
}

void write_text(const std::string& path, const std::string& text, CommandResult& res) {
    std::ofstream o(path);
    if (!o) throw std::runtime_error("cannot write " + path);
    o << text;
    if (!o) throw std::runtime_error("write failed: " + path);
    res.artifacts.push_back(path);
}

void write_network(const Network& net, const std::string& path, CommandResult& res) {
    save_network(net, path);
    res.artifacts.push_back(path);
}

// Returns the number of points whose recalled label is wrong; rational nets must be exact, others within 2^-20.
std::size_t recall_failures(const Network& net, const MemorizationInstance& inst, std::ostream& err) {
    const Evaluator ev(net);
    const bool exact = net.kind().tag == ScalarKind::Tag::rational;
    std::size_t bad = 0;
    for (std::size_t j = 0; j < inst.J(); ++j) {
        std::vector<Scalar> x;
        for (const auto& c : inst.x[j]) x.push_back(Scalar(c).to(net.kind()));
        const auto y = ev(x);
        bool ok = y.size() == inst.y[j].size();
        for (std::size_t k = 0; ok && k < y.size(); ++k) {
            const auto want = static_cast<double>(inst.y[j][k]);
            ok = exact ? y[k].to_rational() == mpq_class(static_cast<unsigned long>(inst.y[j][k]))
                       : std::abs(y[k].to_double() - want) <= std::ldexp(1.0, -20);
        }
        if (!ok) {
            if (bad < 5) err << "recall mismatch at point " << j << '\n';
            ++bad;
        }
    }
    return bad;
}

double sup_error_on_samples(const Network& net, const HolderTarget& t, std::size_t samples, std::uint64_t seed,
                            unsigned threads) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> xs(samples);
    for (auto& x : xs) x = t.sampler(rng);
    const auto out = Evaluator(net).eval_batch(xs, threads);
    double e = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) e = std::max(e, std::abs(out[i][0] - t.f(xs[i])));
    return e;
}

std::string size_line(const Network& net) {
    const auto s = size_report(net);
    std::ostringstream o;
    o << "width " << s.width << " depth " << s.depth << " params " << s.param_count << " max|w| "
      << s.max_magnitude.to_double() << " scalar " << net.kind().name();
    return o.str();
}

// eval --net net.json (--input x1,x2,... | --points cloud.csv) [--out out.csv]
struct EvalArgs {
    std::string net, points, out;
    std::vector<std::string> inputs;
};

void cmd_eval(const EvalArgs& a, const Globals& g, CommandResult& res, std::ostream& out) {
    Network net = read_network(a.net);
    if (auto k = g.kind()) net = net.to(*k);
    const ScalarKind kind = net.kind();
    std::vector<std::vector<Scalar>> xs;
    for (const auto& s : a.inputs) {
        std::vector<Scalar> x;
        try {
            for (const auto& c : split(s, ',')) x.push_back(parse_in(c, kind));
        } catch (const std::exception& e) {
            throw InputError(std::string("--input: ") + e.what());
        }
        xs.push_back(std::move(x));
    }
    if (!a.points.empty())
        for (const auto& p : read_cloud(a.points).points) {
            std::vector<Scalar> x;
            for (double c : p) x.push_back(Scalar(c).to(kind));
            xs.push_back(std::move(x));
        }
    if (xs.empty()) throw std::invalid_argument("eval: give --input or --points");
    for (const auto& x : xs)
        if (x.size() != net.input_dim())
            throw InputError("eval: input of dimension " + std::to_string(x.size()) + ", network expects " +
                             std::to_string(net.input_dim()));
    const Evaluator ev(net);
    std::ostringstream csv;
    for (std::size_t k = 0; k < net.input_dim(); ++k) csv << 'x' << k << ',';
    for (std::size_t k = 0; k < net.output_dim(); ++k) csv << 'y' << k << (k + 1 < net.output_dim() ? "," : "\n");
    for (const auto& x : xs) {
        const auto y = ev(x);
        for (const auto& c : x) csv << display(c) << ',';
        for (std::size_t k = 0; k < y.size(); ++k) csv << display(y[k]) << (k + 1 < y.size() ? "," : "\n");
    }
    if (a.out.empty())
        out << csv.str();
    else
        write_text(a.out, csv.str(), res);
    res.summary = "evaluated " + std::to_string(xs.size()) + " points, " + size_line(net);
}

// memorize --instance pts.json --N n --L l [--out net.json] [--report r.json] [--verify]
struct MemorizeArgs {
    std::string instance, out, report;
    std::size_t N = 0, L = 0;
    bool verify = false;
};

void cmd_memorize(const MemorizeArgs& a, const Globals& g, CommandResult& res, std::ostream& err) {
    const auto inst = read_instance(a.instance);
    MemorizeOptions opt;
    opt.kind = g.kind();
    opt.seed = g.seed;
    MemorizeReport rep;
    const Network net = memorize_nd(inst, a.N, a.L, opt, &rep);
    if (!a.out.empty()) write_network(net, a.out, res);
    if (!a.report.empty()) {
        json j = {{"J", rep.J},
                  {"n", rep.n},
                  {"L_prime", rep.L_prime},
                  {"M", rep.M},
                  {"s", rep.s},
                  {"s_prime", rep.s_prime},
                  {"c", rep.c},
                  {"r", rep.r},
                  {"scalar", rep.kind.name()},
                  {"width", rep.size.width},
                  {"depth", rep.size.depth},
                  {"max_magnitude", rep.size.max_magnitude.to_double()},
                  {"budget_width", rep.budget_width},
                  {"budget_depth", rep.budget_depth},
                  {"budget_magnitude", rep.budget_magnitude},
                  {"projection_tries", rep.projection_tries}};
        write_text(a.report, j.dump(2) + "\n", res);
    }
    res.summary = "memorized " + std::to_string(inst.J()) + " points, " + size_line(net);
    if (a.verify) {
        const auto bad = recall_failures(net, inst, err);
        if (bad) throw AssertionFailure(std::to_string(bad) + " of " + std::to_string(inst.J()) + " labels not recalled");
        res.summary += ", recall verified";
    }
}

// approx --target t.json --N n --L l [--K k] [--eps e] [--out net.json] [--report r.csv|r.json] [--max-error e]
struct ApproxArgs {
    std::string target, out, report;
    std::size_t N = 0, L = 0, K = 0, discovery = 200000, eval = 1000;
    double eps = 0, max_error = -1;
};

void cmd_approx(const ApproxArgs& a, const Globals& g, CommandResult& res) {
    const auto t = read_target(a.target);
    HolderOptions ho;
    ho.K = a.K;
    ho.eps = a.eps;
    ho.discovery_samples = a.discovery;
    ho.eval_samples = a.eval;
    ho.seed = g.seed;
    ho.threads = g.threads;
    auto r = holder_approx_net(t, a.N, a.L, ho);
    Network net = r.net;
    if (auto k = g.kind()) net = net.to(*k);
    if (!a.out.empty()) write_network(net, a.out, res);
    if (!a.report.empty())
        write_text(a.report,
                   ends_with(a.report, ".json") ? r.report.to_json().dump(2) + "\n"
                                                : ApproxReport::csv_header() + "\n" + r.report.csv_row() + "\n",
                   res);
    std::ostringstream o;
    o << t.name << ": K " << r.report.K << " cells " << r.report.cells << " measured sup error "
      << r.report.measured_sup_error << " bound " << r.report.bound << ", " << size_line(net);
    res.summary = o.str();
    if (a.max_error >= 0 && !(r.report.measured_sup_error >= 0 && r.report.measured_sup_error <= a.max_error))
        throw AssertionFailure("measured sup error " + std::to_string(r.report.measured_sup_error) + " exceeds " +
                               std::to_string(a.max_error));
}

// compose --model xy|spec.json --eps e [--N n --L l] [--out net.json] [--report r.json|r.csv] [--verify]
struct ComposeArgs {
    std::string model, out, report;
    double eps = 0.1;
    std::size_t N = 4, L = 2, K = 0, discovery = 200000, eval = 500, domain = 20000, measure = 2000;
    bool verify = false, validate_only = false, level_zero = false;
};

void cmd_compose(const ComposeArgs& a, const Globals& g, CommandResult& res, std::ostream& out) {
    const auto spec = read_model(a.model);
    if (a.validate_only) {
        const auto diag = validate_model(spec, 200, g.seed);
        out << diag.to_json().dump(2) << '\n';
        res.summary = spec.name + ": model " + (diag.ok ? "valid" : "invalid");
        if (!diag.ok) throw AssertionFailure(diag.violations.empty() ? "model invalid" : diag.violations.front());
        return;
    }
    CompositionalOptions opt;
    opt.N = a.N;
    opt.L = a.L;
    opt.holder.K = a.K;
    opt.holder.discovery_samples = a.discovery;
    opt.holder.eval_samples = a.eval;
    opt.domain_samples = a.domain;
    opt.measure_samples = a.measure;
    opt.seed = g.seed;
    opt.threads = g.threads;
    opt.include_level_zero = a.level_zero;
    CompositionalResult r;
    try {
        r = compositional_net(spec, a.eps, opt);
    } catch (const std::invalid_argument& e) {
        throw InputError(a.model + ": " + e.what());
    }
    Network net = r.net;
    if (auto k = g.kind()) net = net.to(*k);
    if (!a.out.empty()) write_network(net, a.out, res);
    if (!a.report.empty())
        write_text(a.report,
                   ends_with(a.report, ".csv") ? CompositionalReport::csv_header() + "\n" + r.report.csv_rows()
                                               : r.report.to_json().dump(2) + "\n",
                   res);
    std::ostringstream o;
    o << spec.name << ": eps " << a.eps << " final sup error " << r.report.final_sup_error << " schedule "
      << (r.report.schedule.holds ? "holds" : "violated") << ", " << size_line(net);
    res.summary = o.str();
    if (a.verify && !r.report.ok) throw AssertionFailure("compositional error bound not met");
}

// cover --cloud pts.csv --eps e [--exact] [--out centers.json] [--max-count k]
struct CoverArgs {
    std::string cloud, out;
    double eps = 0;
    bool exact = false;
    long max_count = -1;
};

void cmd_cover(const CoverArgs& a, CommandResult& res) {
    const auto c = read_cloud(a.cloud);
    const auto r = a.exact ? exact_cover(c, a.eps) : greedy_cover(c, a.eps);
    if (!a.out.empty()) {
        json j = {{"eps", r.eps}, {"count", r.count}, {"method", r.method}, {"centers", r.centers}};
        write_text(a.out, j.dump(2) + "\n", res);
    }
    res.summary = "count " + std::to_string(r.count) + " (" + r.method + ", " + std::to_string(c.points.size()) + " points)";
    if (!is_cover(c, r)) throw AssertionFailure("centres do not cover the cloud");
    if (a.max_count >= 0 && r.count > static_cast<std::size_t>(a.max_count))
        throw AssertionFailure("count " + std::to_string(r.count) + " exceeds " + std::to_string(a.max_count));
}

// dim --cloud pts.csv [--grid e1,e2,...] [--scales k --decades d] [--expect m --tol t] [--report r.json]
struct DimArgs {
    std::string cloud, grid, report;
    std::size_t scales = 8;
    double decades = 2, expect = -1, tol = 0.35;
};

void cmd_dim(const DimArgs& a, CommandResult& res) {
    const auto c = read_cloud(a.cloud);
    std::vector<double> grid;
    if (!a.grid.empty())
        for (const auto& s : split(a.grid, ',')) grid.push_back(std::stod(s));
    else
        grid = default_eps_grid(c, a.scales, a.decades);
    const auto f = minkowski_slope(c, grid);
    if (!a.report.empty()) {
        json j = {{"slope", f.slope}, {"intercept", f.intercept}, {"eps", f.eps},
                  {"counts", f.counts}, {"used", f.used},           {"residuals", f.residuals}};
        write_text(a.report, j.dump(2) + "\n", res);
    }
    std::ostringstream o;
    o << "slope " << f.slope << " over " << std::count(f.used.begin(), f.used.end(), true) << " scales";
    res.summary = o.str();
    if (a.expect >= 0 && std::abs(f.slope - a.expect) > a.tol)
        throw AssertionFailure("slope " + std::to_string(f.slope) + " not within " + std::to_string(a.tol) + " of " +
                               std::to_string(a.expect));
}

// erm-sweep --target t.json [--sigma s] [--n 128,256,...] [--trials t] [--csv out.csv] [--report r.json] [--verify]
struct ErmArgs {
    std::string target, n, csv, report;
    double sigma = 0.1, arch_scale = 4.0, benchmark_scale = 1.0;
    std::size_t trials = 5, epochs = 200, restarts = 3, mc = 4000, width_factor = 8, L = 2;
    bool no_benchmark = false, verify = false;
};

void cmd_erm(const ErmArgs& a, const Globals& g, CommandResult& res) {
    RegressionConfig cfg;
    cfg.target = read_target(a.target);
    cfg.sigma = a.sigma;
    if (!a.n.empty()) {
        cfg.n_grid.clear();
        for (const auto& s : split(a.n, ',')) cfg.n_grid.push_back(std::stoul(s));
    }
    cfg.trials = a.trials;
    cfg.L = a.L;
    cfg.arch_scale = a.arch_scale;
    cfg.width_factor = a.width_factor;
    cfg.train.epochs = a.epochs;
    cfg.train.restarts = a.restarts;
    cfg.mc_samples = a.mc;
    cfg.benchmark = !a.no_benchmark;
    cfg.benchmark_scale = a.benchmark_scale;
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    const auto r = rate_experiment(cfg);
    if (!a.csv.empty()) write_text(a.csv, r.csv(), res);
    if (!a.report.empty()) write_text(a.report, r.to_json().dump(2) + "\n", res);
    std::ostringstream o;
    o << "slope " << r.slope << " exponent " << r.exponent << " band [" << r.band_lo << ", " << r.band_hi << "] "
      << (r.pass ? "inside" : "outside") << ", suboptimal trials " << r.suboptimal_trials;
    res.summary = o.str();
    if (a.verify && !r.pass) throw AssertionFailure("fitted slope outside the band");
}

// verify --net net.json (--instance pts.json | --target t.json --max-error e [--samples n])
struct VerifyArgs {
    std::string net, instance, target;
    double max_error = -1;
    std::size_t samples = 2000;
};

void cmd_verify(const VerifyArgs& a, const Globals& g, CommandResult& res, std::ostream& err) {
    Network net = read_network(a.net);
    if (auto k = g.kind()) net = net.to(*k);
    if (!a.instance.empty()) {
        const auto inst = read_instance(a.instance);
        if (inst.D() != net.input_dim() || inst.outputs() != net.output_dim())
            throw InputError("verify: instance and network dimensions differ");
        const auto bad = recall_failures(net, inst, err);
        res.summary = std::to_string(inst.J() - bad) + " of " + std::to_string(inst.J()) + " labels recalled";
        if (bad) throw AssertionFailure(res.summary);
        return;
    }
    if (a.target.empty()) throw std::invalid_argument("verify: give --instance or --target");
    const auto t = read_target(a.target);
    if (t.D != net.input_dim() || net.output_dim() != 1) throw InputError("verify: target and network dimensions differ");
    const double e = sup_error_on_samples(net, t, a.samples, g.seed, g.threads);
    res.summary = "sup error " + std::to_string(e) + " on " + std::to_string(a.samples) + " samples";
    if (a.max_error >= 0 && !(e <= a.max_error))
        throw AssertionFailure(res.summary + " exceeds " + std::to_string(a.max_error));
}

}  // namespace

CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"relusynth: explicit ReLU network constructions and experiments", "relusynth"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--scalar", g.scalar, "f64 | bigfloat:<bits> | rational")->check([](const std::string& s) {
        try {
            ScalarKind::parse(s);
            return std::string();
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
    });
    app.add_option("--seed", g.seed, "random seed");
    app.add_option("--threads", g.threads, "worker threads (0: hardware default)");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "evaluate a serialized network");
    eval->add_option("--net", ea.net)->required();
    eval->add_option("--input", ea.inputs, "comma-separated coordinates; repeatable");
    eval->add_option("--points", ea.points, "CSV or JSON point cloud");
    eval->add_option("--out", ea.out, "CSV output (default: stdout)");

    MemorizeArgs ma;
    auto* mem = app.add_subcommand("memorize", "fit labelled points exactly");
    mem->add_option("--instance", ma.instance)->required();
    mem->add_option("--N", ma.N)->required()->check(CLI::PositiveNumber);
    mem->add_option("--L", ma.L)->required()->check(CLI::PositiveNumber);
    mem->add_option("--out", ma.out);
    mem->add_option("--report", ma.report);
    mem->add_flag("--verify", ma.verify, "check exact recall of every label");

    ApproxArgs aa;
    auto* apx = app.add_subcommand("approx", "piecewise-Taylor approximation of a Holder target");
    apx->add_option("--target", aa.target)->required();
    apx->add_option("--N", aa.N)->required()->check(CLI::PositiveNumber);
    apx->add_option("--L", aa.L)->required()->check(CLI::PositiveNumber);
    apx->add_option("--K", aa.K, "grid resolution (default from N, L)");
    apx->add_option("--eps", aa.eps, "requested accuracy");
    apx->add_option("--discovery", aa.discovery, "cell discovery samples");
    apx->add_option("--eval-samples", aa.eval, "error measurement samples");
    apx->add_option("--out", aa.out);
    apx->add_option("--report", aa.report, "CSV, or JSON by extension");
    apx->add_option("--max-error", aa.max_error, "fail when the measured sup error exceeds this");

    ComposeArgs ca;
    auto* cmp = app.add_subcommand("compose", "approximate a compositional model");
    cmp->add_option("--model", ca.model, "identity | xy | sparse-aggregation | spec.json")->required();
    cmp->add_option("--eps", ca.eps);
    cmp->add_option("--N", ca.N);
    cmp->add_option("--L", ca.L);
    cmp->add_option("--K", ca.K);
    cmp->add_option("--discovery", ca.discovery);
    cmp->add_option("--eval-samples", ca.eval);
    cmp->add_option("--domain-samples", ca.domain);
    cmp->add_option("--measure-samples", ca.measure);
    cmp->add_flag("--include-level-zero", ca.level_zero);
    cmp->add_option("--out", ca.out);
    cmp->add_option("--report", ca.report, "JSON, or CSV by extension");
    cmp->add_flag("--verify", ca.verify, "fail unless the schedule holds and the final error is within eps");
    cmp->add_flag("--validate-only", ca.validate_only, "check the model assumptions and stop");

    CoverArgs co;
    auto* cov = app.add_subcommand("cover", "sup-norm covering of a point cloud");
    cov->add_option("--cloud", co.cloud)->required();
    cov->add_option("--eps", co.eps)->required()->check(CLI::PositiveNumber);
    cov->add_flag("--exact", co.exact, "minimal cover (at most 20 points)");
    cov->add_option("--out", co.out);
    cov->add_option("--max-count", co.max_count);

    DimArgs da;
    auto* dim = app.add_subcommand("dim", "covering-number dimension estimate");
    dim->add_option("--cloud", da.cloud)->required();
    dim->add_option("--grid", da.grid, "comma-separated radii");
    dim->add_option("--scales", da.scales);
    dim->add_option("--decades", da.decades);
    dim->add_option("--expect", da.expect);
    dim->add_option("--tol", da.tol);
    dim->add_option("--report", da.report);

    ErmArgs ra;
    auto* erm = app.add_subcommand("erm-sweep", "empirical risk rate experiment");
    erm->add_option("--target", ra.target)->required();
    erm->add_option("--sigma", ra.sigma);
    erm->add_option("--n", ra.n, "comma-separated sample sizes");
    erm->add_option("--trials", ra.trials);
    erm->add_option("--L", ra.L);
    erm->add_option("--arch-scale", ra.arch_scale);
    erm->add_option("--width-factor", ra.width_factor);
    erm->add_option("--epochs", ra.epochs);
    erm->add_option("--restarts", ra.restarts);
    erm->add_option("--mc", ra.mc);
    erm->add_option("--benchmark-scale", ra.benchmark_scale);
    erm->add_flag("--no-benchmark", ra.no_benchmark);
    erm->add_option("--csv", ra.csv);
    erm->add_option("--report", ra.report);
    erm->add_flag("--verify", ra.verify, "fail when the slope is outside the band");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "check a network against an instance or a target");
    ver->add_option("--net", va.net)->required();
    ver->add_option("--instance", va.instance);
    ver->add_option("--target", va.target);
    ver->add_option("--max-error", va.max_error);
    ver->add_option("--samples", va.samples);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CommandResult res;
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        res.exit_code = code == 0 ? kOk : kUsage;
        return res;
    }

    try {
        if (*eval) cmd_eval(ea, g, res, out);
        else if (*mem) cmd_memorize(ma, g, res, err);
        else if (*apx) cmd_approx(aa, g, res);
        else if (*cmp) cmd_compose(ca, g, res, out);
        else if (*cov) cmd_cover(co, res);
        else if (*dim) cmd_dim(da, res);
        else if (*erm) cmd_erm(ra, g, res);
        else if (*ver) cmd_verify(va, g, res, err);
    } catch (const AssertionFailure& e) {
        err << "assertion failed: " << e.what() << '\n';
        res.exit_code = kAssertionFailed;
    } catch (const InputError& e) {
        err << "bad input: " << e.what() << '\n';
        res.exit_code = kBadInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        res.exit_code = kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        res.exit_code = kRuntime;
    }
    if (!res.summary.empty()) out << res.summary << '\n';
    for (const auto& p : res.artifacts) out << "wrote " << p << '\n';
    return res;
}

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr).exit_code;
}

}  // namespace relusynth::cli
