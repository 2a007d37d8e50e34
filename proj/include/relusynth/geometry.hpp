#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace relusynth {

struct PointCloud {
    std::vector<std::vector<double>> points;
    std::string description;
    std::uint64_t seed = 0;

    std::size_t dim() const { return points.empty() ? 0 : points[0].size(); }
};

void validate(const PointCloud& c);

// CSV (one point per row, optional non-numeric header) or JSON ({"points": [[...], ...]} or a bare array).
PointCloud load_cloud(const std::string& path);

double sup_distance(const std::vector<double>& a, const std::vector<double>& b);

struct CoverReport {
    double eps = 0;
    std::vector<std::vector<double>> centers;
    std::size_t count = 0;
    std::string method;  // "greedy" or "exact-small"
};

// Every point lies within eps (sup norm) of some center.
bool is_cover(const PointCloud& c, const CoverReport& r);

// Farthest-point traversal seeded at the bounding-box centre; later centres are cloud points (lowest index on ties).
class FarthestPointOrder {
public:
    explicit FarthestPointOrder(const PointCloud& c);
    // Smallest k with radius(k) <= eps; the box centre and the first k - 1 traversal points form the cover.
    std::size_t count(double eps);
    const std::vector<std::size_t>& order() const { return order_; }
    const std::vector<double>& radii() const { return radii_; }  // radii_[k-1]: max distance to the first k centres

private:
    void extend();
    const PointCloud& cloud_;
    std::vector<std::size_t> order_;
    std::vector<double> radii_;
    std::vector<double> dist_;
};

CoverReport greedy_cover(const PointCloud& c, double eps);
// Minimal cover: smallest partition into groups of coordinate range <= 2 eps; at most 20 points.
CoverReport exact_cover(const PointCloud& c, double eps);

struct SlopeFit {
    double slope = 0, intercept = 0;
    std::vector<double> eps;
    std::vector<std::size_t> counts;
    std::vector<bool> used;        // false where the knee heuristic dropped the scale
    std::vector<double> residuals; // for used scales, in order
};

// Least-squares slope of log N(eps) against log(1/eps). Scales whose count exceeds n/10 are dropped
// as sample-density limited, provided at least three scales remain.
SlopeFit minkowski_slope(const PointCloud& c, const std::vector<double>& eps_grid);
// Geometric grid of `count` radii from diam/2 down to diam/2 * 10^-decades.
std::vector<double> default_eps_grid(const PointCloud& c, std::size_t count = 8, double decades = 2.0);

struct ClassBound {
    double log_count = 0;
    bool vacuous = false;
};

// c N^2 L log((N+1)^L B^L / eps), natural log; vacuous when eps >= (N+1)^L B^L.
ClassBound class_covering_bound(double N, double L, double B, double eps, double c = 1.0);

// N_A * ceil(1 + eps/eta)^m * constant
double enlargement_cover_bound(double cover_of_A, double eps, double eta, int m, double constant = 1.0);
// N_A * (1 + eps/eta)^m * constant
double enlargement_cover_bound_smooth(double cover_of_A, double eps, double eta, int m, double constant = 1.0);
// Constant certifying greedy(A^{+eps}, eta) <= c * greedy(A, eta) * (1 + eps/eta)^m for farthest-point covers.
double greedy_enlargement_constant(int m);

}  // namespace relusynth
