#include "sixv/chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sixv {

namespace {
int wrap(int y, int L) { return ((y % L) + L) % L; }
}  // namespace

std::vector<SignedArrow> height_steps(Face from, Face to) {
    std::vector<SignedArrow> out;
    const int y = from.y;
    if (to.x > from.x)
        for (int k = from.x + 1; k <= to.x; ++k) out.push_back({{ArrowKind::vertical, k, y}, -1});
    else
        for (int k = from.x; k > to.x; --k) out.push_back({{ArrowKind::vertical, k, y}, +1});
    const int x = to.x;
    if (to.y > y)
        for (int j = y + 1; j <= to.y; ++j) out.push_back({{ArrowKind::horizontal, x, j}, +1});
    else
        for (int j = y; j > to.y; --j) out.push_back({{ArrowKind::horizontal, x, j}, -1});
    return out;
}

void ArrowMonomial::multiply(const Arrow& a, int L) {
    auto& slot = a.kind == ArrowKind::horizontal ? columns : lines;
    const Mask bit = Mask{1} << wrap(a.y, L);
    const Mask v = (slot[a.x] ^= bit);
    if (v == 0) slot.erase(a.x);
}

ArrowMonomial ArrowMonomial::operator*(const ArrowMonomial& o) const {
    ArrowMonomial r = *this;
    for (const auto& [x, m] : o.columns)
        if ((r.columns[x] ^= m) == 0) r.columns.erase(x);
    for (const auto& [x, m] : o.lines)
        if ((r.lines[x] ^= m) == 0) r.lines.erase(x);
    return r;
}

ArrowMonomial ArrowMonomial::shifted(int dx) const {
    ArrowMonomial r;
    for (const auto& [x, m] : columns) r.columns[x + dx] = m;
    for (const auto& [x, m] : lines) r.lines[x + dx] = m;
    return r;
}

int ArrowMonomial::min_column() const {
    int lo = std::numeric_limits<int>::max();
    if (!columns.empty()) lo = std::min(lo, columns.begin()->first);
    if (!lines.empty()) lo = std::min(lo, lines.begin()->first - 1);
    return lo;
}

int ArrowMonomial::max_column() const {
    int hi = std::numeric_limits<int>::min();
    if (!columns.empty()) hi = std::max(hi, columns.rbegin()->first);
    if (!lines.empty()) hi = std::max(hi, lines.rbegin()->first);
    return hi;
}

ArrowPolynomial ArrowPolynomial::constant(double v) {
    ArrowPolynomial p;
    if (v != 0.0) p.terms_[ArrowMonomial{}] = v;
    return p;
}

ArrowPolynomial ArrowPolynomial::height_difference(Face from, Face to, int L) {
    ArrowPolynomial p;
    for (const SignedArrow& s : height_steps(from, to)) {
        ArrowMonomial m;
        m.multiply(s.arrow, L);
        if ((p.terms_[m] += s.sign) == 0.0) p.terms_.erase(m);
    }
    return p;
}

ArrowPolynomial ArrowPolynomial::operator*(const ArrowPolynomial& o) const {
    ArrowPolynomial r;
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_) {
            const ArrowMonomial m = a * b;
            if ((r.terms_[m] += ca * cb) == 0.0) r.terms_.erase(m);
        }
    return r;
}

ArrowPolynomial& ArrowPolynomial::operator+=(const ArrowPolynomial& o) {
    for (const auto& [m, c] : o.terms_)
        if ((terms_[m] += c) == 0.0) terms_.erase(m);
    return *this;
}

ArrowPolynomial ArrowPolynomial::shifted(int dx) const {
    ArrowPolynomial r;
    for (const auto& [m, c] : terms_) r.terms_[m.shifted(dx)] = c;
    return r;
}

namespace {

void apply_diagonal(const BasisIndex& basis, Mask kappa, Eigen::VectorXd& state) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const int minus = std::popcount(kappa & ~basis.config(i));
        if (minus % 2) state[static_cast<Eigen::Index>(i)] = -state[static_cast<Eigen::Index>(i)];
    }
}

Mask lookup(const std::map<int, Mask>& m, int x) {
    const auto it = m.find(x);
    return it == m.end() ? Mask{0} : it->second;
}

}  // namespace

Eigen::VectorXd propagate_right(const TransitionTable& tr, const BasisIndex& basis, double lambda0,
                                const ArrowMonomial& mono, int x0, int x1, Eigen::VectorXd state) {
    Eigen::VectorXd next;
    for (int x = x0; x <= x1; ++x) {
        if (x > x0) {
            tr.apply(lookup(mono.lines, x), state, next, lambda0);
            state.swap(next);
        }
        if (const Mask k = lookup(mono.columns, x)) apply_diagonal(basis, k, state);
    }
    return state;
}

Eigen::VectorXd propagate_left(const TransitionTable& tr, const BasisIndex& basis, double lambda0,
                               const ArrowMonomial& mono, int x0, int x1, Eigen::VectorXd state) {
    Eigen::VectorXd next;
    for (int x = x1; x >= x0; --x) {
        if (x < x1) {
            // Transpose of the one-step operator for monomial J is (-1)^{|J|} times itself.
            const Mask J = lookup(mono.lines, x + 1);
            tr.apply(J, state, next, lambda0);
            if (std::popcount(J) % 2) next = -next;
            state.swap(next);
        }
        if (const Mask k = lookup(mono.columns, x)) apply_diagonal(basis, k, state);
    }
    return state;
}

double cylinder_expectation(const EigenSystem& sys, const ArrowMonomial& mono) {
    if (mono.empty()) return 1.0;
    const Eigen::VectorXd out = propagate_right(sys.transitions(), sys.basis(), sys.lambda0(), mono,
                                                mono.min_column(), mono.max_column(), sys.v0());
    return sys.v0().dot(out);
}

double cylinder_expectation(const EigenSystem& sys, const ArrowPolynomial& poly) {
    double s = 0.0;
    for (const auto& [m, c] : poly.terms()) s += c * cylinder_expectation(sys, m);
    return s;
}

TorusChain::TorusChain(int M, int L, const ModelParams& p)
    : M_(M), basis_(enumerate_balanced(L)), table_(basis_, p), scale_(2.0 + p.c * p.c), trace_norm_(0.0) {
    if (M < 1) throw std::invalid_argument("torus needs at least one column");
    trace_norm_ = raw_trace(ArrowMonomial{});
}

double TorusChain::raw_trace(const ArrowMonomial& mono) const {
    // Fold columns and lines onto the torus.
    ArrowMonomial folded;
    for (const auto& [x, m] : mono.columns)
        if ((folded.columns[wrap(x, M_)] ^= m) == 0) folded.columns.erase(wrap(x, M_));
    for (const auto& [x, m] : mono.lines)
        if ((folded.lines[wrap(x, M_)] ^= m) == 0) folded.lines.erase(wrap(x, M_));
    double tr = 0.0;
    const auto n = static_cast<Eigen::Index>(basis_.size());
    Eigen::VectorXd e(n), next;
    for (Eigen::Index i = 0; i < n; ++i) {
        e.setZero();
        e[i] = 1.0;
        Eigen::VectorXd s = propagate_right(table_, basis_, scale_, folded, 0, M_ - 1, e);
        table_.apply(lookup(folded.lines, 0), s, next, scale_);
        tr += next[i];
    }
    return tr;
}

double TorusChain::expectation(const ArrowMonomial& mono) const { return raw_trace(mono) / trace_norm_; }

double TorusChain::expectation(const ArrowPolynomial& poly) const {
    double s = 0.0;
    for (const auto& [m, c] : poly.terms()) s += c * expectation(m);
    return s;
}

SlabObservable SlabObservable::reflected() const {
    SlabObservable r;
    r.side = side == Side::left ? Side::right : Side::left;
    r.width = width;
    for (const auto& [a, b] : factors) r.factors.push_back({{-a.x, a.y}, {-b.x, b.y}});
    return r;
}

ArrowPolynomial SlabObservable::polynomial(int L) const {
    ArrowPolynomial p = ArrowPolynomial::constant(1.0);
    for (const auto& [a, b] : factors) p = p * ArrowPolynomial::height_difference(a, b, L);
    return p;
}

void SlabObservable::validate(int max_width) const {
    if (width < 0) throw std::invalid_argument("slab width must be non-negative");
    if (width > max_width)
        throw std::invalid_argument("slab width " + std::to_string(width) + " exceeds the cap " + std::to_string(max_width));
    if (width == 0 && !factors.empty()) throw std::invalid_argument("a width-0 slab carries no faces");
    const int lo = side == Side::left ? 1 - width : 0;
    const int hi = side == Side::left ? 0 : width - 1;
    for (const auto& [a, b] : factors)
        for (const Face& f : {a, b})
            if (f.x < lo || f.x > hi) throw std::invalid_argument("observable face lies outside its slab");
}

Eigen::VectorXd slab_state(const SlabObservable& obs, const EigenSystem& sys, int max_width) {
    obs.validate(max_width);
    const int L = sys.L();
    const auto n = static_cast<Eigen::Index>(sys.size());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    if (obs.width == 0) return sys.v0();
    const ArrowPolynomial poly = obs.polynomial(L);
    for (const auto& [m, c] : poly.terms()) {
        Eigen::VectorXd s = obs.side == Side::left
                                ? propagate_right(sys.transitions(), sys.basis(), sys.lambda0(), m, 1 - obs.width, 0, sys.v0())
                                : propagate_left(sys.transitions(), sys.basis(), sys.lambda0(), m, 0, obs.width - 1, sys.v0());
        acc += c * s;
    }
    return acc;
}

Eigen::VectorXcd slab_embedding(const SlabObservable& obs, const EigenSystem& sys, int max_width) {
    const Eigen::VectorXcd pr = sys.project(slab_state(obs, sys, max_width));
    return obs.side == Side::left ? pr : Eigen::VectorXcd(pr.conjugate());
}

}  // namespace sixv
