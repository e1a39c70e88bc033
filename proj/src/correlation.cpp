#include "sixv/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sixv {

Face PointQuad::step(int i) const {
    const Face& u = points.at(2 * i);
    const Face& v = points.at(2 * i + 1);
    return {v.x - u.x, v.y - u.y};
}

Face PointQuad::gap(int i) const {
    const Face& v = points.at(2 * i + 1);
    const Face& u = points.at(2 * i + 2);
    return {u.x - v.x, u.y - v.y};
}

bool PointQuad::horizontally_ordered() const {
    if (points.size() % 2 != 0 || points.empty()) return false;
    for (int i = 0; i < pairs(); ++i) {
        if (step(i).x < 0) return false;
        if (i + 1 < pairs() && gap(i).x < 0) return false;
    }
    return true;
}

cplx chi_discrete(const PointQuad& quad, double a, double b) {
    if (quad.pairs() != 2) throw std::invalid_argument("chi is defined for two pairs");
    const Face s1 = quad.step(0), g1 = quad.gap(0), s2 = quad.step(1);
    auto term = [&](Face d) { return std::pow(1.0 - a, d.x) * std::exp(cplx(0.0, -b * d.y)); };
    return (term(s2) - 1.0) * term(g1) * (1.0 - term(s1));
}

double cylinder_two_point_spectral(const SpectralMeasure& mu, const PointQuad& quad) {
    if (quad.pairs() != 2 || !quad.horizontally_ordered())
        throw std::invalid_argument("spectral formula needs a horizontally ordered two-pair quad");
    cplx s = 0.0;
    for (const auto& at : mu.atoms) s += at.weight * chi_discrete(quad, at.a, at.b);
    if (std::abs(s.imag()) > kImagTol)
        throw std::runtime_error("spectral correlator has imaginary part " + std::to_string(s.imag()));
    return s.real();
}

DirectCorrelator::DirectCorrelator(int L, Evaluator eval) : L_(L), eval_(std::move(eval)) {}

DirectCorrelator DirectCorrelator::cylinder(const EigenSystem& sys) {
    return DirectCorrelator(sys.L(), [&sys](const ArrowMonomial& m) { return cylinder_expectation(sys, m); });
}

DirectCorrelator DirectCorrelator::torus(const TorusChain& chain, int L) {
    return DirectCorrelator(L, [&chain](const ArrowMonomial& m) { return chain.expectation(m); });
}

namespace {
int slot_of(const Arrow& a) { return a.kind == ArrowKind::horizontal ? 2 * a.x : 2 * a.x - 1; }
Arrow arrow_at_slot(int slot, int y) {
    if (slot % 2 == 0) return {ArrowKind::horizontal, slot / 2, y};
    return {ArrowKind::vertical, (slot + 1) / 2, y};
}
}  // namespace

double DirectCorrelator::arrow_pair(const Arrow& p0, const Arrow& q0) {
    Arrow p = p0, q = q0;
    if (slot_of(q) < slot_of(p)) std::swap(p, q);
    const int ds = slot_of(q) - slot_of(p);
    const int dy = ((q.y - p.y) % L_ + L_) % L_;
    if (ds == 0 && dy == 0) return 1.0;
    const int base = p.kind == ArrowKind::horizontal ? 0 : 1;
    const auto key = std::make_tuple(base, ds, dy, 0);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    ArrowMonomial m;
    m.multiply(arrow_at_slot(base, 0), L_);
    m.multiply(arrow_at_slot(base + ds, dy), L_);
    const double v = eval_(m);
    cache_.emplace(key, v);
    return v;
}

double DirectCorrelator::two_point(const PointQuad& quad) {
    if (quad.pairs() != 2) throw std::invalid_argument("two-point correlator needs two pairs");
    const auto s1 = height_steps(quad.points[0], quad.points[1]);
    const auto s2 = height_steps(quad.points[2], quad.points[3]);
    double v = 0.0;
    for (const auto& e : s1)
        for (const auto& f : s2) v += e.sign * f.sign * arrow_pair(e.arrow, f.arrow);
    return v;
}

double DirectCorrelator::one_point(Face from, Face to) {
    double v = 0.0;
    for (const auto& e : height_steps(from, to)) {
        ArrowMonomial m;
        m.multiply(e.arrow, L_);
        v += e.sign * eval_(m);
    }
    return v;
}

double cylinder_two_point_direct(const EigenSystem& sys, const PointQuad& quad) {
    return DirectCorrelator::cylinder(sys).two_point(quad);
}

int TorusConfig::horizontal(int x, int y) const {
    return kappa[static_cast<std::size_t>(((x % M) + M) % M * L + ((y % L) + L) % L)];
}

int TorusConfig::vertical(int x, int y) const {
    return alpha[static_cast<std::size_t>(((x % M) + M) % M * L + ((y % L) + L) % L)];
}

int TorusConfig::height_difference(Face from, Face to) const {
    int h = 0;
    for (const auto& s : height_steps(from, to))
        h += s.sign * (s.arrow.kind == ArrowKind::horizontal ? horizontal(s.arrow.x, s.arrow.y)
                                                              : vertical(s.arrow.x, s.arrow.y));
    return h;
}

TorusSums torus_enumerate(int M, int L, const ModelParams& p, TorusSector sector,
                          const std::vector<TorusObservable>& observables, int cap) {
    if (M < 1 || L < 2) throw std::invalid_argument("torus dimensions too small");
    if (M * L > cap)
        throw std::invalid_argument("torus " + std::to_string(M) + "x" + std::to_string(L) +
                                    " exceeds the brute-force cap of " + std::to_string(cap) + " vertices");
    const int n = M * L;
    // Variables 0..n-1 are kappa, n..2n-1 are alpha; the assignment order is chosen so that
    // every vertex becomes checkable as early as possible.
    auto kap = [&](int x, int y) { return ((x % M) + M) % M * L + ((y % L) + L) % L; };
    auto alp = [&](int x, int y) { return n + kap(x, y); };
    std::vector<int> order;
    for (int y = 0; y < L; ++y) order.push_back(kap(M - 1, y));
    for (int x = 0; x < M; ++x)
        for (int y = 0; y < L; ++y) {
            order.push_back(alp(x, y));
            if (x < M - 1) order.push_back(kap(x, y));
        }
    std::vector<int> pos(2 * n);
    for (int i = 0; i < 2 * n; ++i) pos[order[i]] = i;

    struct Vertex {
        int left, right, low, up;
    };
    std::vector<std::vector<Vertex>> checks(2 * n);
    for (int x = 0; x < M; ++x)
        for (int y = 0; y < L; ++y) {
            Vertex v{kap(x - 1, y), kap(x, y), alp(x, y - 1), alp(x, y)};
            const int last = std::max({pos[v.left], pos[v.right], pos[v.low], pos[v.up]});
            checks[last].push_back(v);
        }

    TorusSums out;
    out.observables.assign(observables.size(), 0.0);
    std::vector<signed char> val(2 * n, 0);
    std::vector<double> cpow(n + 1);
    for (int i = 0; i <= n; ++i) cpow[i] = std::pow(p.c, i);
    TorusConfig cfg;
    cfg.M = M;
    cfg.L = L;

    auto leaf = [&](int cv) {
        if (sector != TorusSector::all) {
            for (int x = 0; x < M; ++x) {
                int s = 0;
                for (int y = 0; y < L; ++y) s += val[kap(x, y)];
                if (s != 0) return;
            }
        }
        if (sector == TorusSector::zero_winding) {
            for (int y = 0; y < L; ++y) {
                int s = 0;
                for (int x = 0; x < M; ++x) s += val[alp(x, y)];
                if (s != 0) return;
            }
        }
        cfg.kappa.assign(val.begin(), val.begin() + n);
        cfg.alpha.assign(val.begin() + n, val.end());
        cfg.c_vertices = cv;
        const double w = cpow[cv];
        out.Z += w;
        ++out.configurations;
        for (std::size_t i = 0; i < observables.size(); ++i) out.observables[i] += w * observables[i](cfg);
    };

    std::function<void(int, int)> dfs = [&](int depth, int cv) {
        if (depth == 2 * n) {
            leaf(cv);
            return;
        }
        for (signed char s : {static_cast<signed char>(1), static_cast<signed char>(-1)}) {
            val[order[depth]] = s;
            bool ok = true;
            int add = 0;
            for (const Vertex& v : checks[depth]) {
                if (val[v.left] + val[v.low] != val[v.right] + val[v.up]) {
                    ok = false;
                    break;
                }
                add += val[v.left] != val[v.right];
            }
            if (ok) dfs(depth + 1, cv + add);
        }
        val[order[depth]] = 0;
    };
    dfs(0, 0);
    return out;
}

double torus_brute_force(int M, int L, const ModelParams& p, const TorusObservable& obs, TorusSector sector, int cap) {
    const TorusSums s = torus_enumerate(M, L, p, sector, {obs}, cap);
    if (s.Z <= 0.0) throw std::runtime_error("empty torus sector");
    return s.observables[0] / s.Z;
}

double green_function(Point2 x, Point2 y) {
    return -std::log(std::hypot(y.x - x.x, y.y - x.y)) / (2.0 * std::numbers::pi);
}

namespace {

double pairing_sum(const std::vector<Point2>& pts, std::vector<int>& rest) {
    if (rest.empty()) return 1.0;
    const int first = rest.front();
    double s = 0.0;
    for (std::size_t j = 1; j < rest.size(); ++j) {
        const int partner = rest[j];
        std::vector<int> next;
        for (std::size_t t = 1; t < rest.size(); ++t)
            if (t != j) next.push_back(rest[t]);
        s += green_function(pts[first], pts[partner]) * pairing_sum(pts, next);
    }
    return s;
}

double dist(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

double gff_k_point(const std::vector<Point2>& points, double sigma2) {
    if (points.size() % 2 != 0) throw std::invalid_argument("points must come in pairs");
    const int k = static_cast<int>(points.size() / 2);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (dist(points[2 * i + a], points[2 * j + b]) == 0.0)
                        throw std::invalid_argument("points of different pairs coincide");
    if (k % 2 == 1) return 0.0;
    double total = 0.0;
    std::vector<Point2> chosen(k);
    for (int mask = 0; mask < (1 << k); ++mask) {
        int unprimed = 0;
        for (int i = 0; i < k; ++i) {
            const bool primed = (mask >> i) & 1;
            chosen[i] = points[2 * i + (primed ? 1 : 0)];
            unprimed += !primed;
        }
        std::vector<int> rest(k);
        for (int i = 0; i < k; ++i) rest[i] = i;
        total += (unprimed % 2 ? -1.0 : 1.0) * pairing_sum(chosen, rest);
    }
    return std::pow(sigma2, k / 2.0) * total;
}

SigmaSquared sigma_squared(const ModelParams& p) {
    if (!(p.c > 0.0) || p.c > 2.0) throw std::invalid_argument("sigma^2 needs c in (0, 2]");
    SigmaSquared s{};
    s.via_arccos = 2.0 / std::acos(p.delta());
    s.via_arcsin = 1.0 / std::asin(p.c / 2.0);
    s.value = s.via_arcsin;
    return s;
}

ScaleSeparation scale_separation(Point2 a, Point2 a2, Point2 b, Point2 b2) {
    const double la = dist(a, a2), lb = dist(b, b2);
    if (la == 0.0 || lb == 0.0) throw std::invalid_argument("scale separation needs non-degenerate pairs");
    const double d = std::min({dist(a, b), dist(a, b2), dist(a2, b), dist(a2, b2)});
    const double m = std::min(la, lb);
    ScaleSeparation s{};
    s.S = d == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(d / m);
    s.S_prime = std::log(std::max(1.0, d) / m);
    return s;
}

namespace {

double envelope_pairings(const std::vector<Point2>& pts, std::vector<int>& rest, double alpha, int k) {
    if (rest.empty()) return 1.0;
    const int i = rest.front();
    double s = 0.0;
    for (std::size_t t = 1; t < rest.size(); ++t) {
        const int j = rest[t];
        std::vector<int> next;
        for (std::size_t r = 1; r < rest.size(); ++r)
            if (r != t) next.push_back(rest[r]);
        const ScaleSeparation sep = scale_separation(pts[2 * i], pts[2 * i + 1], pts[2 * j], pts[2 * j + 1]);
        const double factor = sep.S >= 20.0 * k * k ? std::exp(-alpha * sep.S) : std::max(1.0, -sep.S_prime);
        s += factor * envelope_pairings(pts, next, alpha, k);
    }
    return s;
}

}  // namespace

double regularity_envelope(const std::vector<Point2>& points, double C, double alpha) {
    if (points.size() % 2 != 0) throw std::invalid_argument("points must come in pairs");
    const int k = static_cast<int>(points.size() / 2);
    if (k % 2 == 1) return 0.0;
    std::vector<int> rest(k);
    for (int i = 0; i < k; ++i) rest[i] = i;
    return C * envelope_pairings(points, rest, alpha, k);
}

double regularity_envelope(const PointQuad& quad, double C, double alpha) {
    std::vector<Point2> pts;
    for (const Face& f : quad.points) pts.push_back({double(f.x), double(f.y)});
    return regularity_envelope(pts, C, alpha);
}

}  // namespace sixv
