#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sixv/chain.hpp"

namespace sixv::mc {

// Counter-based generator: output n is a SplitMix64 finaliser applied to key + n * golden.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    double uniform();  // [0, 1)
    bool coin() { return next() >> 63; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

enum class FaceRole : std::uint8_t { outside, boundary, interior };

// Faces are stored on a grid with one row and column of padding for even domains. Even faces
// have x + y even. Diagonal neighbours are ordered (+1,+1), (-1,+1), (-1,-1), (+1,-1).
class Geometry {
public:
    enum class Kind { even_domain, torus };

    // Largest even domain inside the face box [0, W] x [0, H]; W, H even and >= 4. Its boundary
    // is the zigzag circuit through the even faces next to the box sides, minus the corners.
    static Geometry even_domain(int W, int H);
    // M columns by L rows (x mod M, y mod L); both even.
    static Geometry torus(int M, int L);

    Kind kind() const { return kind_; }
    int width() const { return W_; }
    int height() const { return H_; }
    int cells() const { return static_cast<int>(role_.size()); }
    int index(int x, int y) const;  // wraps on the torus; -1 outside the stored grid
    Face face(int idx) const { return face_[static_cast<std::size_t>(idx)]; }
    FaceRole role(int idx) const { return role_[static_cast<std::size_t>(idx)]; }
    bool in_domain(int idx) const { return idx >= 0 && role(idx) != FaceRole::outside; }
    bool is_even(int idx) const;
    // -1 where the neighbour is not in the domain or the diagonal is not a domain edge.
    const std::array<int, 4>& axis_neighbours(int idx) const { return axis_[static_cast<std::size_t>(idx)]; }
    const std::array<int, 4>& diagonal_neighbours(int idx) const { return diag_[static_cast<std::size_t>(idx)]; }
    const std::vector<int>& free_even() const { return free_even_; }
    const std::vector<int>& free_odd() const { return free_odd_; }
    const std::vector<int>& boundary_circuit() const { return circuit_; }  // cyclic order
    int interior_count() const { return static_cast<int>(free_even_.size() + free_odd_.size()); }
    // Chebyshev distance from a face to the nearest boundary face (large on the torus).
    int boundary_distance(Face f) const;
    // Even edge (idx, d) lies on the boundary circuit.
    bool boundary_edge(int idx, int d) const { return bedge_[static_cast<std::size_t>(idx)][static_cast<std::size_t>(d)]; }
    // The two odd cells of the odd edge crossing even edge (idx, d); -1 outside the stored grid.
    std::array<int, 2> dual(int idx, int d) const;

private:
    Kind kind_ = Kind::even_domain;
    int W_ = 0;
    int H_ = 0;
    int nx_ = 0;
    int ny_ = 0;
    int offset_ = 0;
    std::vector<FaceRole> role_;
    std::vector<Face> face_;
    std::vector<std::array<int, 4>> axis_;
    std::vector<std::array<int, 4>> diag_;
    std::vector<int> free_even_;
    std::vector<int> free_odd_;
    std::vector<int> circuit_;
    std::vector<std::array<bool, 2>> bedge_;
    friend struct GeometryBuilder;
};

struct HeightField {
    const Geometry* geometry = nullptr;
    std::vector<int> h;  // per cell; 0 outside
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t counter = 0;  // generator position after the last sweep

    int at(Face f) const { return h[static_cast<std::size_t>(geometry->index(f.x, f.y))]; }
};

// Flat start: 0 on even faces and 1 on odd faces.
HeightField flat_field(const Geometry& g);
// Adjacent faces differ by one, parity matches, zero on the boundary circuit.
bool is_valid_height(const HeightField& f, std::string* why = nullptr);
int agreement_count(const HeightField& f);  // #A(h) over even and odd domain diagonals

// Heat-bath probability of choosing m+1 when n_plus diagonal neighbours sit at m+1 and n_minus at m-1.
template <typename T>
T heat_bath_up(T c, int n_plus, int n_minus) {
    T up(1), down(1);
    for (int i = 0; i < n_plus; ++i) up = up * c;
    for (int i = 0; i < n_minus; ++i) down = down * c;
    return up / (up + down);
}

// Single-face update; returns false if the face is frozen (neighbours not all equal).
bool heat_bath_update(HeightField& f, int idx, double c, CounterRng& rng);
// One sweep: all free even faces, then all free odd faces.
void heat_bath_sweep(HeightField& f, double c, CounterRng& rng);
HeightField heat_bath_sampler(const Geometry& g, const ModelParams& p, long sweeps, std::uint64_t seed,
                              std::uint64_t stream = 0);

// Spin representation. Even edges are keyed by their lower endpoint and direction:
// edge (idx, d) joins idx and idx + (1, 1) for d = 0, idx + (-1, 1) for d = 1.
struct SpinConfig {
    const Geometry* geometry = nullptr;
    std::vector<signed char> sigma;          // per cell: even spin on even faces, odd spin on odd faces
    std::vector<std::array<bool, 2>> omega;  // per even cell, for the two upward diagonals
    bool open(int idx, int d) const { return omega[static_cast<std::size_t>(idx)][static_cast<std::size_t>(d)]; }
};

// sigma_even = + iff h in 4Z, sigma_odd = + iff h in 1 + 4Z.
signed char even_spin(int h);
signed char odd_spin(int h);
SpinConfig sample_spin_config(const HeightField& f, const ModelParams& p, CounterRng& rng);
// Checks the three indicator constraints on omega.
bool omega_constraints_hold(const SpinConfig& s, std::string* why = nullptr);
// Rebuilds h from h(v) - h(u) = sigma_even(u) sigma_odd(v), zero on the boundary.
HeightField height_from_spins(const SpinConfig& s);

// Bounded components of the plane minus omega, as components of odd faces joined across
// even edges not in omega. Returns the component id per cell (-1 if not an interior odd face).
std::vector<int> odd_components(const SpinConfig& s, int* count = nullptr);
// Fair coin per bounded component of the plane minus omega.
void resample_odd_spins(SpinConfig& s, CounterRng& rng);

struct LevelLineTree {
    struct Vertex {
        enum class Type { even_plus, even_minus, odd } type;
        int parent = -1;
        int depth = 0;
        int children = 0;
    };
    std::vector<Vertex> vertices;  // vertex 0 is the root
    std::vector<int> vertex_of;    // per cell; -1 outside the domain
    const Geometry* geometry = nullptr;

    int depth(Face f) const;
    int branching(Face u, Face v) const;  // depth of the lowest common ancestor
    int odd_vertex_count() const;
};

// Throws std::logic_error if a structural invariant fails. If `field` is given, h must be
// constant on every vertex.
LevelLineTree build_level_line_tree(const SpinConfig& s, const HeightField* field = nullptr);
// E[h(u) h(v) | tree] from the branching function.
int conditional_covariance(const LevelLineTree& t, Face u, Face v);
// Heights for one coin per odd vertex (coins[i] is the coin of the i-th odd vertex in index order).
std::vector<int> tree_heights(const LevelLineTree& t, const std::vector<int>& coins);

enum class AltMode { hori, verti, circuit, arm };

// Rectangle [x0, x1] x [y0, y1] of faces for hori/verti; annulus of Chebyshev radii r < R about
// `centre` for circuit/arm. Arms are counted as the number of sign changes in the circular order
// of the crossing clusters, which is a lower bound.
struct Region {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    Face centre{};
    int r = 0, R = 0;
    static Region rectangle(int x0, int y0, int x1, int y1);
    static Region annulus(Face centre, int r, int R);
};
int count_alternating(const SpinConfig& s, const Region& region, AltMode mode);

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    double tau = 0.0;  // integrated autocorrelation time in samples, from batch means
    long samples = 0;
    int batches = 0;
    bool sufficient = true;  // false if the batch count or requested precision was not reached
    std::string note;
};

// Batch-means estimate of the mean of a sample sequence.
Estimate batch_means(const std::vector<double>& xs, int batches = 32);
// Combines per-chain estimates; chains are independent.
Estimate merge_chains(const std::vector<Estimate>& parts);

struct MCParams {
    ModelParams model;
    long burn_in = 1000;
    long samples = 1000;          // per chain
    long sweeps_per_sample = 1;
    int chains = 1;
    std::uint64_t seed = 1;
    int margin = 1;               // minimum distance of query faces from the boundary
    double target_stderr = 0.0;   // 0 disables the precision check
    int threads = 0;              // 0: one per chain up to hardware concurrency
};

using FieldObservable = std::function<double(const HeightField&)>;
// Runs independent chains and returns one estimate per observable, merged over chains.
std::vector<Estimate> run_chains(const Geometry& g, const MCParams& p, const std::vector<FieldObservable>& obs);

// k-point function E[prod_i (h(u_i') - h(u_i))] for the pairs in `points`.
double height_product(const HeightField& f, const std::vector<Face>& points);
Estimate estimate_correlator(const Geometry& g, const MCParams& p, const std::vector<Face>& points);

struct DominanceReport {
    bool conclusive = true;
    long conditioned = 0;      // samples satisfying the event
    int m = 0;
    double violation = 0.0;    // max_t [P(m - h <= t) - P(h - m <= t)]^+
    double advantage = 0.0;    // max_t [P(h - m <= t) - P(m - h <= t)]^+
    double p_value = 1.0;      // permutation test of the violation
    std::string note;
};

// m is the maximum of 2 ceil(h/2) over the circuit, per sample, plus `m_shift`.
DominanceReport flip_domination_test(const std::vector<HeightField>& samples, const std::vector<Face>& circuit,
                                     Face probe, const std::function<bool(const HeightField&)>& event,
                                     int m_shift = 0, double min_mass = 0.01, int permutations = 1000,
                                     std::uint64_t seed = 1);

}  // namespace sixv::mc
