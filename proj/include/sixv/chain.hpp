#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sixv/transfer.hpp"

namespace sixv {

// Faces are unit squares indexed by their lower-left corner. Column x holds the horizontal
// arrows kappa^x_y; line x is the vertical line between columns x-1 and x and holds alpha^x_y.
//
// Height convention (the only one compatible with the ice rule at every vertex):
//   h(x, y) - h(x, y-1) = +kappa^x_y      (crossing the horizontal edge at height y)
//   h(x, y) - h(x-1, y) = -alpha^x_y      (crossing line x at height y)
struct Face {
    int x = 0;
    int y = 0;
    bool operator==(const Face&) const = default;
    auto operator<=>(const Face&) const = default;
};

enum class ArrowKind { horizontal, vertical };

struct Arrow {
    ArrowKind kind;
    int x;  // column for horizontal arrows, line for vertical arrows
    int y;
};

struct SignedArrow {
    Arrow arrow;
    int sign;
};

// h(to) - h(from) as a sum of unit arrow steps: along row from.y to column to.x, then up or
// down column to.x.
std::vector<SignedArrow> height_steps(Face from, Face to);

// Product of arrow variables with heights reduced mod L; squares cancel.
struct ArrowMonomial {
    std::map<int, Mask> columns;
    std::map<int, Mask> lines;

    bool empty() const { return columns.empty() && lines.empty(); }
    void multiply(const Arrow& a, int L);
    ArrowMonomial operator*(const ArrowMonomial& o) const;
    ArrowMonomial shifted(int dx) const;
    auto operator<=>(const ArrowMonomial&) const = default;
    bool operator==(const ArrowMonomial&) const = default;
    int min_column() const;  // leftmost column touched (a line x touches column x-1)
    int max_column() const;
};

class ArrowPolynomial {
public:
    ArrowPolynomial() = default;
    static ArrowPolynomial constant(double v);
    static ArrowPolynomial height_difference(Face from, Face to, int L);

    ArrowPolynomial operator*(const ArrowPolynomial& o) const;
    ArrowPolynomial& operator+=(const ArrowPolynomial& o);
    ArrowPolynomial shifted(int dx) const;
    const std::map<ArrowMonomial, double>& terms() const { return terms_; }

private:
    std::map<ArrowMonomial, double> terms_;
};

// Propagate a column state from column x0 to column x1 (x0 <= x1) through the operator chain
// of a monomial: diagonal kappa factors on each column, the normalised one-step operator for
// the alpha factors on each crossed line.
Eigen::VectorXd propagate_right(const TransitionTable& tr, const BasisIndex& basis, double lambda0,
                                const ArrowMonomial& mono, int x0, int x1, Eigen::VectorXd state);
// Transposed chain, run from column x1 down to column x0.
Eigen::VectorXd propagate_left(const TransitionTable& tr, const BasisIndex& basis, double lambda0,
                               const ArrowMonomial& mono, int x0, int x1, Eigen::VectorXd state);

// Infinite-cylinder expectation: v0^T (chain) v0.
double cylinder_expectation(const EigenSystem& sys, const ArrowMonomial& mono);
double cylinder_expectation(const EigenSystem& sys, const ArrowPolynomial& poly);

// Finite torus of M columns, balanced sector: Tr(chain) / Tr(t^M). Columns are taken mod M.
class TorusChain {
public:
    TorusChain(int M, int L, const ModelParams& p);
    int M() const { return M_; }
    double partition_trace() const { return trace_norm_; }  // Tr(t^M) / lambda_scale^M
    double lambda_scale() const { return scale_; }
    double expectation(const ArrowMonomial& mono) const;
    double expectation(const ArrowPolynomial& poly) const;

private:
    double raw_trace(const ArrowMonomial& mono) const;
    int M_;
    BasisIndex basis_;
    TransitionTable table_;
    double scale_;
    double trace_norm_;
};

// Product of face height differences h(second) - h(first) lying in a slab of `width` columns.
// Left slabs occupy columns [1-width, 0]; right slabs occupy [0, width-1].
enum class Side { left, right };

struct SlabObservable {
    Side side = Side::left;
    int width = 0;
    std::vector<std::pair<Face, Face>> factors;

    // Reflection x -> -x of every face; turns a left observable into a right one.
    SlabObservable reflected() const;
    ArrowPolynomial polynomial(int L) const;
    void validate(int max_width) const;
};

inline constexpr int kDefaultSlabCap = 3;

// Configuration-space state of the observable at column 0: for a left observable the chain
// applied to v0; for a right one the transposed chain applied to v0 (a row vector stored as a column).
Eigen::VectorXd slab_state(const SlabObservable& obs, const EigenSystem& sys, int max_width = kDefaultSlabCap);
// Same object in the joint eigenbasis: v_k^dagger E(X) for left, E(Y) v_k for right.
Eigen::VectorXcd slab_embedding(const SlabObservable& obs, const EigenSystem& sys, int max_width = kDefaultSlabCap);

}  // namespace sixv
