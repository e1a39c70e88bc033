#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <vector>

#include "sixv/basis.hpp"

namespace sixv {

using cplx = std::complex<double>;

struct ModelParams {
    double c = 1.0;

    static ModelParams from_c(double c);
    double delta() const { return (2.0 - c * c) / 2.0; }
    // arccos(-delta); defined for c in (0, 2].
    double zeta() const;
};

// Vertex j separates the left arrow kappa_j from the right arrow kappa'_j; the vertical
// arrows below and above it are alpha_{j-1} and alpha_j (cyclic). Ice rule:
// kappa_j + alpha_{j-1} = kappa'_j + alpha_j. A c-vertex is one with kappa_j != kappa'_j.
std::vector<Mask> valid_verticals(ColumnConfig from, ColumnConfig to);

double transfer_entry(ColumnConfig from, ColumnConfig to, const ModelParams& p);
double vertical_entry(ColumnConfig from, ColumnConfig to, int j, const ModelParams& p);

// Sum over valid alpha of c^{#c} * prod_{j in monomial} alpha_j.
double line_entry(Mask from, Mask to, int L, Mask monomial, double c);

// Off-diagonal transitions out of a column: kappa' = kappa ^ flips with a unique vertical
// assignment. The diagonal term (two constant verticals) is not reported.
struct Transition {
    Mask target = 0;
    int flips = 0;
    Mask alpha = 0;  // bit j set means alpha_j = +1
};
std::vector<Transition> flip_transitions(Mask from, int L);

// Dense operators in the balanced basis; entry (row=to, col=from).
Eigen::MatrixXd dense_transfer(const BasisIndex& basis, const ModelParams& p);
Eigen::MatrixXd dense_vertical(const BasisIndex& basis, int j, const ModelParams& p);
Eigen::MatrixXd dense_shift(const BasisIndex& basis);

// Sparse transitions for every basis column, weights c^{#flips} precomputed.
class TransitionTable {
public:
    TransitionTable(const BasisIndex& basis, const ModelParams& p);

    struct Entry {
        std::int32_t target;
        Mask alpha;
        double weight;
    };
    std::size_t size() const { return offsets_.size() - 1; }
    const Entry* begin(std::size_t i) const { return entries_.data() + offsets_[i]; }
    const Entry* end(std::size_t i) const { return entries_.data() + offsets_[i + 1]; }

    // out = M_J w where M_J is the one-step operator for the alpha monomial J, divided by scale.
    void apply(Mask monomial, const Eigen::VectorXd& w, Eigen::VectorXd& out, double scale) const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
};

class EigenSystem {
public:
    struct Sector {
        int momentum = 0;
        std::vector<std::int32_t> orbits;  // orbit ids allowed in this sector
        Eigen::VectorXd eigenvalues;       // raw eigenvalues of t in this sector
        Eigen::MatrixXcd vectors;          // columns in the sector Fourier basis
    };

    int L() const { return basis_.L(); }
    const ModelParams& params() const { return params_; }
    const BasisIndex& basis() const { return basis_; }
    const OrbitTable& orbits() const { return orbits_; }
    double lambda0() const { return lambda0_; }
    std::size_t size() const { return modes_.size(); }

    // Normalised transfer eigenvalue, shift eigenvalue, momentum m and b in (-pi, pi].
    double Lambda(std::size_t k) const;
    cplx shift_eigenvalue(std::size_t k) const;
    int momentum(std::size_t k) const { return sectors_[modes_[k].sector].momentum; }
    double b(std::size_t k) const;

    const Eigen::VectorXd& v0() const { return v0_; }
    Eigen::VectorXcd full_vector(std::size_t k) const;
    // All components v_k^dagger w, ordered by k.
    Eigen::VectorXcd project(const Eigen::VectorXd& w) const;
    Eigen::VectorXcd project(const Eigen::VectorXcd& w) const;

    const std::vector<Sector>& sectors() const { return sectors_; }
    struct Mode {
        std::int32_t sector;
        std::int32_t column;
    };
    const std::vector<Mode>& modes() const { return modes_; }

    const TransitionTable& transitions() const;

    // Largest residual of the normalised eigen-equations, checked on the sector blocks.
    double max_residual() const { return max_residual_; }

    friend EigenSystem build_and_codiagonalize(int L, const ModelParams& p, int max_L);
    friend EigenSystem load_eigensystem(const std::filesystem::path& file, int max_L);

private:
    void finalize();

    ModelParams params_;
    BasisIndex basis_;
    OrbitTable orbits_;
    std::vector<Sector> sectors_;
    std::vector<Mode> modes_;
    double lambda0_ = 0.0;
    double max_residual_ = 0.0;
    Eigen::VectorXd v0_;
    std::vector<std::vector<std::int32_t>> orbit_pos_;  // [sector][orbit id] -> row, or -1
    std::vector<std::vector<std::int32_t>> members_;    // [orbit id][offset] -> basis rank
    std::vector<std::vector<std::int32_t>> mode_index_; // [sector][column] -> k

    mutable std::shared_ptr<TransitionTable> transitions_;
    mutable std::shared_ptr<std::once_flag> transitions_once_ = std::make_shared<std::once_flag>();
};

inline constexpr double kEigenResidualTol = 1e-10;

EigenSystem build_and_codiagonalize(int L, const ModelParams& p, int max_L = kDefaultMaxL);

// Binary cache: magic "6VLAB-EIG-v1", then little-endian int32 L, float64 c, float64 lambda0,
// int32 sector count; per sector: int32 momentum, int32 dim, dim float64 eigenvalues, and
// dim*dim (re, im) float64 pairs in column-major order. Orbits are recomputed on load.
void save_eigensystem(const EigenSystem& sys, const std::filesystem::path& file);
EigenSystem load_eigensystem(const std::filesystem::path& file, int max_L = kDefaultMaxL);

}  // namespace sixv
