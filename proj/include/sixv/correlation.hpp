#pragma once

#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "sixv/chain.hpp"
#include "sixv/spectral.hpp"

namespace sixv {

// Points u_1, u_1', u_2, u_2', ... ; the k-point function is E[prod_i (h(u_i') - h(u_i))].
struct PointQuad {
    std::vector<Face> points;

    int pairs() const { return static_cast<int>(points.size() / 2); }
    // Steps (x_i, y_i) = u_i' - u_i and (x_i', y_i') = u_{i+1} - u_i'.
    Face step(int i) const;
    Face gap(int i) const;
    bool horizontally_ordered() const;
};

cplx chi_discrete(const PointQuad& quad, double a, double b);

inline constexpr double kImagTol = 1e-10;

// Sum of weight * chi over the atoms; requires a horizontally ordered two-pair quad.
double cylinder_two_point_spectral(const SpectralMeasure& mu, const PointQuad& quad);

// Expands both height differences into arrow steps and evaluates every arrow-arrow
// expectation with an operator chain. Pair expectations are memoised by relative position.
class DirectCorrelator {
public:
    using Evaluator = std::function<double(const ArrowMonomial&)>;
    DirectCorrelator(int L, Evaluator eval);
    static DirectCorrelator cylinder(const EigenSystem& sys);
    static DirectCorrelator torus(const TorusChain& chain, int L);

    double two_point(const PointQuad& quad);
    double one_point(Face from, Face to);
    double arrow_pair(const Arrow& p, const Arrow& q);
    std::size_t cache_size() const { return cache_.size(); }

private:
    int L_;
    Evaluator eval_;
    std::map<std::tuple<int, int, int, int>, double> cache_;
};

double cylinder_two_point_direct(const EigenSystem& sys, const PointQuad& quad);

// Exhaustive enumeration of ice configurations on the M x L torus (columns x, heights y).
// kappa[x*L + y] is the horizontal arrow in column x, alpha[x*L + y] the vertical arrow on line x.
struct TorusConfig {
    int M = 0;
    int L = 0;
    std::vector<signed char> kappa;
    std::vector<signed char> alpha;
    int c_vertices = 0;

    int horizontal(int x, int y) const;
    int vertical(int x, int y) const;
    // Sum of arrow steps along the canonical path (row of `from`, then column of `to`).
    int height_difference(Face from, Face to) const;
};

enum class TorusSector { all, balanced, zero_winding };

struct TorusSums {
    double Z = 0.0;          // weighted count of configurations in the sector
    std::vector<double> observables;
    long long configurations = 0;
};

inline constexpr int kBruteForceCap = 32;  // maximum M*L

using TorusObservable = std::function<double(const TorusConfig&)>;
TorusSums torus_enumerate(int M, int L, const ModelParams& p, TorusSector sector,
                          const std::vector<TorusObservable>& observables, int cap = kBruteForceCap);
// Normalised expectation in the sector.
double torus_brute_force(int M, int L, const ModelParams& p, const TorusObservable& obs,
                         TorusSector sector = TorusSector::balanced, int cap = kBruteForceCap);

// Continuum reference.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
};
double green_function(Point2 x, Point2 y);
double gff_k_point(const std::vector<Point2>& points, double sigma2);

struct SigmaSquared {
    double value;
    double via_arccos;  // 2 / arccos(Delta)
    double via_arcsin;  // 1 / arcsin(c/2)
};
SigmaSquared sigma_squared(const ModelParams& p);

struct ScaleSeparation {
    double S;
    double S_prime;
};
ScaleSeparation scale_separation(Point2 a, Point2 a2, Point2 b, Point2 b2);

inline constexpr double kEnvelopeC = 10.0;
inline constexpr double kEnvelopeAlpha = 0.1;
double regularity_envelope(const std::vector<Point2>& points, double C = kEnvelopeC, double alpha = kEnvelopeAlpha);
double regularity_envelope(const PointQuad& quad, double C = kEnvelopeC, double alpha = kEnvelopeAlpha);

}  // namespace sixv
