#include "relusynth/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace relusynth {

void validate(const PointCloud& c) {
    const std::size_t D = c.dim();
    for (const auto& p : c.points) {
        if (p.size() != D) throw std::invalid_argument("point cloud: inconsistent dimensions");
        for (double v : p)
            if (!std::isfinite(v)) throw std::invalid_argument("point cloud: non-finite coordinate");
    }
}

namespace {

PointCloud cloud_from_json(const nlohmann::json& j) {
    PointCloud c;
    const auto& pts = j.is_array() ? j : j.at("points");
    c.points = pts.get<std::vector<std::vector<double>>>();
    if (j.is_object()) {
        c.description = j.value("description", std::string());
        c.seed = j.value("seed", std::uint64_t{0});
    }
    return c;
}

PointCloud cloud_from_csv(std::istream& in) {
    PointCloud c;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> p;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                p.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw std::invalid_argument("point cloud: non-numeric CSV row '" + line + "'");
        }
        first = false;
        c.points.push_back(std::move(p));
    }
    return c;
}

}  // namespace

PointCloud load_cloud(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open cloud file '" + path + "'");
    PointCloud c;
    const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    if (json)
        c = cloud_from_json(nlohmann::json::parse(in));
    else
        c = cloud_from_csv(in);
    if (c.points.empty()) throw std::invalid_argument("point cloud '" + path + "' is empty");
    validate(c);
    return c;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

bool is_cover(const PointCloud& c, const CoverReport& r) {
    for (const auto& p : c.points) {
        bool hit = false;
        for (const auto& z : r.centers)
            if (sup_distance(p, z) <= r.eps) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return r.count == r.centers.size();
}

namespace {

std::vector<double> bbox_centre(const PointCloud& c) {
    const std::size_t D = c.dim();
    std::vector<double> lo(D, std::numeric_limits<double>::infinity()), hi(D, -std::numeric_limits<double>::infinity());
    for (const auto& p : c.points)
        for (std::size_t k = 0; k < D; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    std::vector<double> m(D);
    for (std::size_t k = 0; k < D; ++k) m[k] = lo[k] + (hi[k] - lo[k]) / 2;
    return m;
}

}  // namespace

// The first centre is the bounding-box centre itself; later centres are cloud points.
FarthestPointOrder::FarthestPointOrder(const PointCloud& c) : cloud_(c) {
    validate(c);
    if (c.points.empty()) return;
    const auto m = bbox_centre(c);
    dist_.resize(c.points.size());
    double r = 0;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        dist_[i] = sup_distance(c.points[i], m);
        r = std::max(r, dist_[i]);
    }
    radii_.push_back(r);
}

void FarthestPointOrder::extend() {
    const auto far = static_cast<std::size_t>(std::max_element(dist_.begin(), dist_.end()) - dist_.begin());
    order_.push_back(far);
    double r = 0;
    for (std::size_t i = 0; i < dist_.size(); ++i) {
        dist_[i] = std::min(dist_[i], sup_distance(cloud_.points[i], cloud_.points[far]));
        r = std::max(r, dist_[i]);
    }
    radii_.push_back(r);
}

std::size_t FarthestPointOrder::count(double eps) {
    if (radii_.empty()) return 0;
    while (radii_.back() > eps) extend();
    return static_cast<std::size_t>(std::lower_bound(radii_.begin(), radii_.end(), eps, std::greater<double>()) -
                                    radii_.begin()) + 1;
}

CoverReport greedy_cover(const PointCloud& c, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("greedy_cover: eps must be positive");
    FarthestPointOrder fp(c);
    CoverReport r;
    r.eps = eps;
    r.method = "greedy";
    r.count = fp.count(eps);
    if (r.count == 0) return r;
    r.centers.push_back(bbox_centre(c));
    for (std::size_t k = 0; k + 1 < r.count; ++k) r.centers.push_back(c.points[fp.order()[k]]);
    return r;
}

CoverReport exact_cover(const PointCloud& c, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("exact_cover: eps must be positive");
    validate(c);
    const std::size_t n = c.points.size(), D = c.dim();
    if (n > 20) throw std::invalid_argument("exact_cover: at most 20 points");
    using Mask = std::uint32_t;
    // A group fits in one ball iff every coordinate range is at most 2 eps.
    auto fits = [&](Mask m) {
        for (std::size_t k = 0; k < D; ++k) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = 0; i < n; ++i)
                if (m >> i & 1u) {
                    lo = std::min(lo, c.points[i][k]);
                    hi = std::max(hi, c.points[i][k]);
                }
            if (hi - lo > 2 * eps) return false;
        }
        return true;
    };
    std::unordered_map<Mask, std::pair<int, Mask>> memo;  // remaining -> (count, first group)
    auto solve = [&](auto&& self, Mask rem) -> int {
        if (rem == 0) return 0;
        if (auto it = memo.find(rem); it != memo.end()) return it->second.first;
        const auto p = static_cast<std::size_t>(__builtin_ctz(rem));
        std::vector<Mask> groups;
        auto grow = [&](auto&& g, Mask cur, std::size_t next) -> void {
            bool extended = false;
            for (std::size_t i = next; i < n; ++i) {
                if (!(rem >> i & 1u) || i == p) continue;
                Mask m = cur | (Mask{1} << i);
                if (fits(m)) {
                    extended = true;
                    g(g, m, i + 1);
                }
            }
            if (!extended) groups.push_back(cur);
        };
        grow(grow, Mask{1} << p, 0);
        std::erase_if(groups, [&](Mask g) {
            for (std::size_t i = 0; i < n; ++i)
                if ((rem >> i & 1u) && !(g >> i & 1u) && fits(g | (Mask{1} << i))) return true;
            return false;
        });
        int best = std::numeric_limits<int>::max();
        Mask pick = 0;
        for (Mask g : groups) {
            int v = 1 + self(self, rem & ~g);
            if (v < best) {
                best = v;
                pick = g;
            }
        }
        memo[rem] = {best, pick};
        return best;
    };
    const Mask all = n == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << n) - 1);
    CoverReport r;
    r.eps = eps;
    r.method = "exact-small";
    r.count = static_cast<std::size_t>(solve(solve, all));
    for (Mask rem = all; rem;) {
        const Mask g = memo.at(rem).second;
        std::vector<double> centre(D);
        for (std::size_t k = 0; k < D; ++k) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = 0; i < n; ++i)
                if (g >> i & 1u) {
                    lo = std::min(lo, c.points[i][k]);
                    hi = std::max(hi, c.points[i][k]);
                }
            centre[k] = lo + (hi - lo) / 2;
        }
        r.centers.push_back(std::move(centre));
        rem &= ~g;
    }
    return r;
}

SlopeFit minkowski_slope(const PointCloud& c, const std::vector<double>& eps_grid) {
    if (eps_grid.size() < 4) throw std::invalid_argument("minkowski_slope: need at least 4 scales");
    for (double e : eps_grid)
        if (!(e > 0) || !std::isfinite(e)) throw std::invalid_argument("minkowski_slope: scales must be positive");
    const auto [mn, mx] = std::minmax_element(eps_grid.begin(), eps_grid.end());
    if (std::log10(*mx / *mn) < 1.5 - 1e-9) throw std::invalid_argument("minkowski_slope: grid spans < 1.5 decades");
    if (c.points.empty()) throw std::invalid_argument("minkowski_slope: empty cloud");

    SlopeFit fit;
    fit.eps = eps_grid;
    std::sort(fit.eps.begin(), fit.eps.end(), std::greater<double>());
    FarthestPointOrder fp(c);
    for (double e : fit.eps) fit.counts.push_back(fp.count(e));

    const double limit = static_cast<double>(c.points.size()) / 10.0;
    fit.used.assign(fit.eps.size(), true);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < fit.eps.size(); ++i) kept += static_cast<double>(fit.counts[i]) <= limit;
    if (kept >= 3)
        for (std::size_t i = 0; i < fit.eps.size(); ++i) fit.used[i] = static_cast<double>(fit.counts[i]) <= limit;

    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t i = 0; i < fit.eps.size(); ++i) {
        if (!fit.used[i]) continue;
        const double x = -std::log(fit.eps[i]), y = std::log(static_cast<double>(fit.counts[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1;
    }
    const double den = m * sxx - sx * sx;
    fit.slope = den > 0 ? (m * sxy - sx * sy) / den : 0.0;
    fit.intercept = (sy - fit.slope * sx) / m;
    for (std::size_t i = 0; i < fit.eps.size(); ++i)
        if (fit.used[i])
            fit.residuals.push_back(std::log(static_cast<double>(fit.counts[i])) -
                                    (fit.intercept - fit.slope * std::log(fit.eps[i])));
    return fit;
}

std::vector<double> default_eps_grid(const PointCloud& c, std::size_t count, double decades) {
    if (count < 2) throw std::invalid_argument("default_eps_grid: need at least 2 scales");
    validate(c);
    double diam = 0;
    const std::size_t D = c.dim();
    for (std::size_t k = 0; k < D; ++k) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& p : c.points) {
            lo = std::min(lo, p[k]);
            hi = std::max(hi, p[k]);
        }
        diam = std::max(diam, hi - lo);
    }
    if (!(diam > 0)) diam = 1;
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = diam / 2 * std::pow(10.0, -decades * static_cast<double>(i) / static_cast<double>(count - 1));
    return g;
}

ClassBound class_covering_bound(double N, double L, double B, double eps, double c) {
    if (!(N > 0 && L > 0 && B > 0 && eps > 0 && c > 0))
        throw std::invalid_argument("class_covering_bound: arguments must be positive");
    const double log_scale = L * (std::log(N + 1) + std::log(B));
    ClassBound r;
    r.vacuous = std::log(eps) >= log_scale;
    r.log_count = c * N * N * L * (log_scale - std::log(eps));
    return r;
}

double enlargement_cover_bound(double cover_of_A, double eps, double eta, int m, double constant) {
    if (!(cover_of_A > 0 && eps >= 0 && eta > 0 && m > 0))
        throw std::invalid_argument("enlargement_cover_bound: bad arguments");
    return cover_of_A * std::pow(std::ceil(1 + eps / eta), m) * constant;
}

double enlargement_cover_bound_smooth(double cover_of_A, double eps, double eta, int m, double constant) {
    if (!(cover_of_A > 0 && eps >= 0 && eta > 0 && m > 0))
        throw std::invalid_argument("enlargement_cover_bound: bad arguments");
    return cover_of_A * std::pow(1 + eps / eta, m) * constant;
}

// Centres after the first are eta-separated points of A^{+eps}; each lies within eta + eps of an
// eta-cover centre of A, and a cube of side 2(eta + eps) holds at most (3 + 2 eps/eta)^m of them.
// Adding the first centre gives greedy(A^{+eps}) <= 1 + 3^m (1 + eps/eta)^m N(eta, A) <= 4^m (...).
double greedy_enlargement_constant(int m) { return std::pow(4.0, m); }

}  // namespace relusynth
