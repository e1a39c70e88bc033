#include "sixv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sixv {

double SpectralMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& at : atoms) s += at.weight;
    return s;
}

std::vector<SpectralAtom> raw_spectral_atoms(const EigenSystem& sys) {
    Eigen::VectorXd sv;
    sys.transitions().apply(Mask{1}, sys.v0(), sv, sys.lambda0());
    const Eigen::VectorXcd amp = sys.project(sv);
    std::vector<SpectralAtom> out;
    for (std::size_t k = 1; k < sys.size(); ++k) {
        const double gap = 1.0 - sys.Lambda(k);
        if (gap < 1e-12) throw std::runtime_error("top transfer eigenvalue is degenerate");
        out.push_back({gap, sys.b(k), std::norm(amp[static_cast<Eigen::Index>(k)]) / (gap * gap)});
    }
    return out;
}

namespace {

std::vector<SpectralAtom> merge(std::vector<SpectralAtom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const SpectralAtom& x, const SpectralAtom& y) {
        if (std::abs(x.a - y.a) >= kAtomMergeTol) return x.a < y.a;
        return x.b < y.b;
    });
    std::vector<SpectralAtom> out;
    for (const auto& at : atoms) {
        bool merged = false;
        for (auto it = out.rbegin(); it != out.rend() && std::abs(it->a - at.a) < kAtomMergeTol; ++it)
            if (std::abs(it->b - at.b) < kAtomMergeTol) {
                it->weight += at.weight;
                merged = true;
                break;
            }
        if (!merged) out.push_back(at);
    }
    std::sort(out.begin(), out.end(), [](const SpectralAtom& x, const SpectralAtom& y) {
        return x.a != y.a ? x.a < y.a : x.b < y.b;
    });
    return out;
}

}  // namespace

SpectralMeasure aggregate_and_symmetrize(int L, double c, std::vector<SpectralAtom> atoms) {
    std::vector<SpectralAtom> sym;
    for (const auto& at : merge(std::move(atoms))) {
        if (std::abs(at.b - std::numbers::pi) < kAtomMergeTol || std::abs(at.b) < kAtomMergeTol) {
            sym.push_back(at);
        } else {
            sym.push_back({at.a, at.b, at.weight / 2});
            sym.push_back({at.a, -at.b, at.weight / 2});
        }
    }
    SpectralMeasure mu;
    mu.L = L;
    mu.c = c;
    mu.atoms = merge(std::move(sym));
    return mu;
}

SpectralMeasure spectral_measure(const EigenSystem& sys) {
    return aggregate_and_symmetrize(sys.L(), sys.params().c, raw_spectral_atoms(sys));
}

SpectralMeasure rescale(const SpectralMeasure& mu, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("scale must be positive");
    SpectralMeasure r = mu;
    for (auto& at : r.atoms) {
        at.a /= delta;
        at.b /= delta;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) return 0.0;
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j);
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

ConcentrationReport rescale_and_concentrate(const SpectralMeasure& mu, double delta, double eps, double a_lo,
                                            double a_hi, int bins, double sigma2) {
    if (!(a_hi > a_lo) || bins < 1) throw std::invalid_argument("invalid concentration window");
    const SpectralMeasure nu = rescale(mu, delta);
    ConcentrationReport rep;
    const double width = (a_hi - a_lo) / bins;
    rep.bin_density.assign(bins, 0.0);
    for (int i = 0; i <= bins; ++i) rep.bin_edges.push_back(a_lo + i * width);
    double cone = 0.0;
    for (const auto& at : nu.atoms) {
        if (at.a < a_lo || at.a > a_hi) continue;
        rep.window_mass += at.weight;
        if (std::isinf(eps) || std::abs(at.b) <= (1.0 + eps) * at.a) cone += at.weight;
        const int bin = std::min(bins - 1, static_cast<int>((at.a - a_lo) / width));
        rep.bin_density[bin] += at.weight / width;
    }
    for (int i = 0; i < bins; ++i) {
        const double mid = a_lo + (i + 0.5) * width;
        rep.target_density.push_back(sigma2 / (2.0 * std::numbers::pi * mid));
    }
    rep.empty = rep.window_mass <= 0.0;
    rep.cone_fraction = rep.empty ? 0.0 : cone / rep.window_mass;
    rep.rank_correlation = rep.empty ? 0.0 : spearman(rep.bin_density, rep.target_density);
    return rep;
}

ClassMReport class_m_report(const SpectralMeasure& mu, double c_probe, int levels) {
    ClassMReport rep;
    rep.c_probe = c_probe;
    for (int j = 0; j < levels; ++j) rep.alphas.push_back(std::ldexp(1.0, -j));
    for (double alpha : rep.alphas) {
        double strip = 0.0;
        for (const auto& at : mu.atoms)
            if (at.a > alpha && at.a < 2 * alpha) strip += at.weight;
        rep.strip_mass.push_back(strip);
        rep.sup_strip = std::max(rep.sup_strip, strip);
        std::vector<double> row;
        for (double beta = alpha; beta <= 4.0; beta *= 2) {
            double box = 0.0;
            for (const auto& at : mu.atoms)
                if (at.a > 0 && at.a < alpha && std::abs(at.b) > beta && std::abs(at.b) < 2 * beta) box += at.weight;
            const double ratio = box / std::pow(alpha / beta, c_probe);
            row.push_back(ratio);
            rep.sup_box = std::max(rep.sup_box, ratio);
        }
        rep.box_ratio.push_back(std::move(row));
    }
    return rep;
}

cplx F_discrete(const SpectralMeasure& mu, cplx x, double y) {
    cplx s = 0.0;
    for (const auto& at : mu.atoms) s += at.weight * at.a * std::exp(-at.a * x - cplx(0.0, at.b * y));
    return s;
}

double ComplexAtomMeasure::total_variation() const {
    double s = 0.0;
    for (const auto& at : atoms) s += std::abs(at.weight);
    return s;
}

cplx ComplexAtomMeasure::moment(int n) const {
    cplx s = 0.0;
    for (const auto& at : modes) s += at.weight * std::pow(1.0 - at.a, n);
    return s;
}

ObservableMeasure observable_measure(const SlabObservable& X, const SlabObservable& Y, const EigenSystem& sys,
                                     int max_width) {
    if (X.side != Side::left || Y.side != Side::right)
        throw std::invalid_argument("observable measure needs X on the left and Y on the right");
    const Eigen::VectorXcd ex = slab_embedding(X, sys, max_width);
    const Eigen::VectorXcd ey = slab_embedding(Y, sys, max_width);

    ObservableMeasure out;
    out.measure.L = sys.L();
    for (std::size_t k = 0; k < sys.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        out.measure.modes.push_back({1.0 - sys.Lambda(k), ey[i] * ex[i]});
    }
    std::vector<ComplexAtom> sorted = out.measure.modes;
    std::sort(sorted.begin(), sorted.end(), [](const ComplexAtom& p, const ComplexAtom& q) { return p.a < q.a; });
    for (const auto& at : sorted) {
        if (!out.measure.atoms.empty() && std::abs(out.measure.atoms.back().a - at.a) < kAtomMergeTol)
            out.measure.atoms.back().weight += at.weight;
        else
            out.measure.atoms.push_back(at);
    }

    const int L = sys.L();
    const ArrowPolynomial px = X.polynomial(L);
    const ArrowPolynomial py = Y.polynomial(L);
    for (int n = 0; n < 3; ++n) {
        out.direct[n] = cylinder_expectation(sys, px * py.shifted(n));
        const double err = std::abs(out.measure.moment(n) - out.direct[n]);
        out.max_moment_error = std::max(out.max_moment_error, err);
    }
    if (out.max_moment_error > 1e-8)
        throw std::runtime_error("observable measure fails the moment identity (error " +
                                 std::to_string(out.max_moment_error) + ")");
    return out;
}

}  // namespace sixv
