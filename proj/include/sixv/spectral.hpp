#pragma once

#include <array>
#include <vector>

#include "sixv/chain.hpp"
#include "sixv/transfer.hpp"

namespace sixv {

struct SpectralAtom {
    double a = 0.0;
    double b = 0.0;
    double weight = 0.0;
};

struct SpectralMeasure {
    int L = 0;
    double c = 0.0;
    std::vector<SpectralAtom> atoms;  // sorted by (a, b)

    double total_mass() const;
};

inline constexpr double kAtomMergeTol = 1e-9;

// One atom per mode k > 0, before aggregation.
std::vector<SpectralAtom> raw_spectral_atoms(const EigenSystem& sys);
// Merge equal (a, b) pairs and replace the measure by its b-symmetrisation (b = pi kept single).
SpectralMeasure aggregate_and_symmetrize(int L, double c, std::vector<SpectralAtom> atoms);
SpectralMeasure spectral_measure(const EigenSystem& sys);

// Image of the measure under (a, b) -> (a, b) / delta.
SpectralMeasure rescale(const SpectralMeasure& mu, double delta);

struct ConcentrationReport {
    bool empty = true;
    double window_mass = 0.0;
    double cone_fraction = 0.0;             // mass with |b| <= (1+eps) a, relative to the window
    std::vector<double> bin_edges;          // in the rescaled a variable
    std::vector<double> bin_density;        // window mass per unit a
    std::vector<double> target_density;     // sigma^2 / (2 pi a) at bin midpoints
    double rank_correlation = 0.0;          // Spearman(bin_density, target_density)
};

ConcentrationReport rescale_and_concentrate(const SpectralMeasure& mu, double delta, double eps, double a_lo,
                                            double a_hi, int bins, double sigma2);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct ClassMReport {
    double c_probe = 0.0;
    std::vector<double> alphas;                     // dyadic scales 2^{-j}
    std::vector<double> strip_mass;                 // nu[a in (alpha, 2 alpha)]
    std::vector<std::vector<double>> box_ratio;     // [alpha][beta >= alpha]: nu[(0,alpha) x (beta,2beta)] / (alpha/beta)^c
    double sup_strip = 0.0;
    double sup_box = 0.0;
};

ClassMReport class_m_report(const SpectralMeasure& mu, double c_probe, int levels = 16);

// F(x, y) = sum of weight * a * exp(-a x - i b y).
cplx F_discrete(const SpectralMeasure& mu, cplx x, double y);

struct ComplexAtom {
    double a = 0.0;
    cplx weight;
};

struct ComplexAtomMeasure {
    int L = 0;
    std::vector<ComplexAtom> atoms;  // aggregated over equal a, sorted by a
    std::vector<ComplexAtom> modes;  // one entry per eigenmode, unaggregated

    double total_variation() const;
    cplx moment(int n) const;  // sum of weight (1-a)^n
};

struct ObservableMeasure {
    ComplexAtomMeasure measure;
    std::array<double, 3> direct{};      // E[X tau_n Y] by operator chains, n = 0, 1, 2
    double max_moment_error = 0.0;
};

inline constexpr double kMomentTol = 1e-10;

// X must be a left observable and Y a right one.
ObservableMeasure observable_measure(const SlabObservable& X, const SlabObservable& Y, const EigenSystem& sys,
                                     int max_width = kDefaultSlabCap);

}  // namespace sixv
