#include "sixv/montecarlo.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace sixv::mc {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr int kDiag[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
constexpr int kAxis[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int mod4(int h) { return ((h % 4) + 4) % 4; }

struct DSU {
    std::vector<int> p;
    explicit DSU(int n) : p(static_cast<std::size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[static_cast<std::size_t>(x)] != x) {
            p[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])];
            x = p[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { p[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next() { return mix64(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------------------------
// Geometry

struct GeometryBuilder {
    static void neighbours(Geometry& g, const std::function<bool(int, int)>& diagonal_edge) {
        const int n = g.cells();
        g.axis_.assign(static_cast<std::size_t>(n), {-1, -1, -1, -1});
        g.diag_.assign(static_cast<std::size_t>(n), {-1, -1, -1, -1});
        for (int i = 0; i < n; ++i) {
            if (!g.in_domain(i)) continue;
            const Face f = g.face(i);
            for (int k = 0; k < 4; ++k) {
                const int j = g.index(f.x + kAxis[k][0], f.y + kAxis[k][1]);
                if (g.in_domain(j)) g.axis_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = j;
                const int q = g.index(f.x + kDiag[k][0], f.y + kDiag[k][1]);
                if (g.in_domain(q) && diagonal_edge(i, q))
                    g.diag_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = q;
            }
        }
        for (int i = 0; i < n; ++i) {
            if (!g.in_domain(i) || g.role(i) != FaceRole::interior) continue;
            for (int j : g.axis_[static_cast<std::size_t>(i)])
                if (j < 0) throw std::logic_error("interior face with a missing neighbour");
            (g.is_even(i) ? g.free_even_ : g.free_odd_).push_back(i);
        }
    }
};

int Geometry::index(int x, int y) const {
    if (kind_ == Kind::torus) return (((y % ny_) + ny_) % ny_) * nx_ + ((x % nx_) + nx_) % nx_;
    const int gx = x + offset_, gy = y + offset_;
    if (gx < 0 || gy < 0 || gx >= nx_ || gy >= ny_) return -1;
    return gy * nx_ + gx;
}

bool Geometry::is_even(int idx) const {
    const Face f = face(idx);
    return ((f.x + f.y) % 2 + 2) % 2 == 0;
}

std::array<int, 2> Geometry::dual(int idx, int d) const {
    const Face f = face(idx);
    const int dx = d == 0 ? 1 : -1;
    return {index(f.x + dx, f.y), index(f.x, f.y + 1)};
}

int Geometry::boundary_distance(Face f) const {
    if (kind_ == Kind::torus) return INT_MAX / 2;
    int best = INT_MAX;
    for (int b : circuit_) {
        const Face g = face(b);
        best = std::min(best, std::max(std::abs(g.x - f.x), std::abs(g.y - f.y)));
    }
    return best;
}

Geometry Geometry::even_domain(int W, int H) {
    if (W < 4 || H < 4 || W % 2 || H % 2) throw std::invalid_argument("even domain box sides must be even and >= 4");
    Geometry g;
    g.kind_ = Kind::even_domain;
    g.W_ = W;
    g.H_ = H;
    g.offset_ = 1;
    g.nx_ = W + 3;
    g.ny_ = H + 3;
    const int n = g.nx_ * g.ny_;
    g.role_.assign(static_cast<std::size_t>(n), FaceRole::outside);
    g.face_.resize(static_cast<std::size_t>(n));
    for (int gy = 0; gy < g.ny_; ++gy)
        for (int gx = 0; gx < g.nx_; ++gx) g.face_[static_cast<std::size_t>(gy * g.nx_ + gx)] = {gx - 1, gy - 1};

    std::vector<Face> pts;
    auto push = [&](Face f) {
        if (pts.empty() || !(pts.back() == f)) pts.push_back(f);
    };
    for (int i = 1; i <= W - 1; ++i) push({i, i % 2});
    for (int j = 1; j <= H - 1; ++j) push({W - j % 2, j});
    for (int i = W - 1; i >= 1; --i) push({i, H - i % 2});
    for (int j = H - 1; j >= 1; --j) push({j % 2, j});
    if (pts.front() == pts.back()) pts.pop_back();

    std::set<std::pair<int, int>> bedges;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const int a = g.index(pts[k].x, pts[k].y);
        const int b = g.index(pts[(k + 1) % pts.size()].x, pts[(k + 1) % pts.size()].y);
        g.circuit_.push_back(a);
        g.role_[static_cast<std::size_t>(a)] = FaceRole::boundary;
        bedges.insert({std::min(a, b), std::max(a, b)});
    }
    auto is_bedge = [&](int a, int b) { return bedges.count({std::min(a, b), std::max(a, b)}) > 0; };

    // Odd cells reachable from the padding without crossing the circuit lie outside.
    std::vector<char> outside(static_cast<std::size_t>(n), 0);
    std::deque<int> queue{g.index(-1, 0)};
    outside[static_cast<std::size_t>(queue.front())] = 1;
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        const Face p = g.face(i);
        for (const auto& dd : kDiag) {
            const int j = g.index(p.x + dd[0], p.y + dd[1]);
            if (j < 0 || outside[static_cast<std::size_t>(j)]) continue;
            const int e1 = g.index(p.x + dd[0], p.y), e2 = g.index(p.x, p.y + dd[1]);
            if (is_bedge(e1, e2)) continue;
            outside[static_cast<std::size_t>(j)] = 1;
            queue.push_back(j);
        }
    }
    auto inside_odd = [&](int i) { return i >= 0 && !g.is_even(i) && !outside[static_cast<std::size_t>(i)]; };
    for (int i = 0; i < n; ++i) {
        if (inside_odd(i)) {
            g.role_[static_cast<std::size_t>(i)] = FaceRole::interior;
        } else if (g.is_even(i) && g.role(i) != FaceRole::boundary) {
            const Face f = g.face(i);
            bool all = true;
            for (const auto& a : kAxis) all = all && inside_odd(g.index(f.x + a[0], f.y + a[1]));
            if (all) g.role_[static_cast<std::size_t>(i)] = FaceRole::interior;
        }
    }
    GeometryBuilder::neighbours(g, [&](int a, int b) {
        if (!g.is_even(a)) return g.role(a) == FaceRole::interior && g.role(b) == FaceRole::interior;
        if (is_bedge(a, b)) return true;
        const Face fa = g.face(a), fb = g.face(b);
        return inside_odd(g.index(fb.x, fa.y)) && inside_odd(g.index(fa.x, fb.y));
    });
    g.bedge_.assign(static_cast<std::size_t>(n), {false, false});
    for (int i = 0; i < n; ++i)
        if (g.in_domain(i) && g.is_even(i))
            for (int d = 0; d < 2; ++d) {
                const int j = g.diag_[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
                g.bedge_[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = j >= 0 && is_bedge(i, j);
            }
    return g;
}

Geometry Geometry::torus(int M, int L) {
    if (M < 2 || L < 2 || M % 2 || L % 2) throw std::invalid_argument("torus dimensions must be even and >= 2");
    Geometry g;
    g.kind_ = Kind::torus;
    g.W_ = M;
    g.H_ = L;
    g.nx_ = M;
    g.ny_ = L;
    const int n = M * L;
    g.role_.assign(static_cast<std::size_t>(n), FaceRole::interior);
    g.face_.resize(static_cast<std::size_t>(n));
    for (int y = 0; y < L; ++y)
        for (int x = 0; x < M; ++x) g.face_[static_cast<std::size_t>(y * M + x)] = {x, y};
    GeometryBuilder::neighbours(g, [](int, int) { return true; });
    g.bedge_.assign(static_cast<std::size_t>(n), {false, false});
    return g;
}

// ---------------------------------------------------------------------------------------------
// Height fields and the sampler

HeightField flat_field(const Geometry& g) {
    HeightField f;
    f.geometry = &g;
    f.h.assign(static_cast<std::size_t>(g.cells()), 0);
    for (int i = 0; i < g.cells(); ++i)
        if (g.in_domain(i) && !g.is_even(i)) f.h[static_cast<std::size_t>(i)] = 1;
    return f;
}

bool is_valid_height(const HeightField& f, std::string* why) {
    const Geometry& g = *f.geometry;
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    for (int i = 0; i < g.cells(); ++i) {
        if (!g.in_domain(i)) continue;
        const int h = f.h[static_cast<std::size_t>(i)];
        if (((h % 2) + 2) % 2 != (g.is_even(i) ? 0 : 1)) return fail("parity mismatch at cell " + std::to_string(i));
        if (g.role(i) == FaceRole::boundary && h != 0) return fail("nonzero boundary height");
        for (int j : g.axis_neighbours(i))
            if (j >= 0 && std::abs(f.h[static_cast<std::size_t>(j)] - h) != 1)
                return fail("adjacent faces differ by more than one at cell " + std::to_string(i));
    }
    return true;
}

int agreement_count(const HeightField& f) {
    const Geometry& g = *f.geometry;
    int n = 0;
    for (int i = 0; i < g.cells(); ++i) {
        if (!g.in_domain(i)) continue;
        for (int d = 0; d < 2; ++d) {
            const int j = g.diagonal_neighbours(i)[static_cast<std::size_t>(d)];
            if (j >= 0 && f.h[static_cast<std::size_t>(j)] == f.h[static_cast<std::size_t>(i)]) ++n;
        }
    }
    return n;
}

namespace {

struct UpTable {
    double p[5][5];
    explicit UpTable(double c) {
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) p[a][b] = heat_bath_up(c, a, b);
    }
};

inline bool update_with(HeightField& f, int idx, const UpTable& t, CounterRng& rng) {
    const Geometry& g = *f.geometry;
    int* h = f.h.data();
    const auto& a = g.axis_neighbours(idx);
    const int m = h[a[0]];
    if (h[a[1]] != m || h[a[2]] != m || h[a[3]] != m) return false;
    int np = 0, nm = 0;
    for (int j : g.diagonal_neighbours(idx)) {
        if (j < 0) continue;
        np += h[j] == m + 1;
        nm += h[j] == m - 1;
    }
    h[idx] = rng.uniform() < t.p[np][nm] ? m + 1 : m - 1;
    return true;
}

}  // namespace

bool heat_bath_update(HeightField& f, int idx, double c, CounterRng& rng) {
    const UpTable t(c);
    return update_with(f, idx, t, rng);
}

void heat_bath_sweep(HeightField& f, double c, CounterRng& rng) {
    const UpTable t(c);
    for (int i : f.geometry->free_even()) update_with(f, i, t, rng);
    for (int i : f.geometry->free_odd()) update_with(f, i, t, rng);
    f.counter = rng.counter();
}

namespace {

void sweeps(HeightField& f, double c, CounterRng& rng, long n) {
    const UpTable t(c);
    const auto& ev = f.geometry->free_even();
    const auto& od = f.geometry->free_odd();
    for (long s = 0; s < n; ++s) {
        for (int i : ev) update_with(f, i, t, rng);
        for (int i : od) update_with(f, i, t, rng);
    }
    f.counter = rng.counter();
}

}  // namespace

HeightField heat_bath_sampler(const Geometry& g, const ModelParams& p, long n, std::uint64_t seed,
                              std::uint64_t stream) {
    if (!(p.c > 0)) throw std::invalid_argument("c must be positive");
    HeightField f = flat_field(g);
    f.seed = seed;
    f.stream = stream;
    CounterRng rng(seed, stream);
    sweeps(f, p.c, rng, n);
    return f;
}

// ---------------------------------------------------------------------------------------------
// Spin representation

signed char even_spin(int h) { return mod4(h) == 0 ? 1 : -1; }
signed char odd_spin(int h) { return mod4(h) == 1 ? 1 : -1; }

SpinConfig sample_spin_config(const HeightField& f, const ModelParams& p, CounterRng& rng) {
    const Geometry& g = *f.geometry;
    SpinConfig s;
    s.geometry = &g;
    s.sigma.assign(static_cast<std::size_t>(g.cells()), 0);
    s.omega.assign(static_cast<std::size_t>(g.cells()), {false, false});
    for (int i = 0; i < g.cells(); ++i)
        if (g.in_domain(i))
            s.sigma[static_cast<std::size_t>(i)] = g.is_even(i) ? even_spin(f.h[static_cast<std::size_t>(i)])
                                                                : odd_spin(f.h[static_cast<std::size_t>(i)]);
    const double q = 1.0 / p.c;
    for (int i = 0; i < g.cells(); ++i) {
        if (!g.in_domain(i) || !g.is_even(i)) continue;
        for (int d = 0; d < 2; ++d) {
            const int j = g.diagonal_neighbours(i)[static_cast<std::size_t>(d)];
            if (j < 0) continue;
            bool open;
            if (g.boundary_edge(i, d)) {
                open = true;
            } else if (s.sigma[static_cast<std::size_t>(i)] != s.sigma[static_cast<std::size_t>(j)]) {
                open = false;
            } else {
                const auto du = g.dual(i, d);
                open = s.sigma[static_cast<std::size_t>(du[0])] != s.sigma[static_cast<std::size_t>(du[1])] ||
                       rng.uniform() < q;
            }
            s.omega[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = open;
        }
    }
    return s;
}

bool omega_constraints_hold(const SpinConfig& s, std::string* why) {
    const Geometry& g = *s.geometry;
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    for (int i = 0; i < g.cells(); ++i) {
        if (!g.in_domain(i) || !g.is_even(i)) continue;
        for (int d = 0; d < 2; ++d) {
            const int j = g.diagonal_neighbours(i)[static_cast<std::size_t>(d)];
            if (j < 0) continue;
            const bool open = s.open(i, d);
            if (g.boundary_edge(i, d)) {
                if (!open) return fail("boundary edge closed");
                if (s.sigma[static_cast<std::size_t>(i)] != 1 || s.sigma[static_cast<std::size_t>(j)] != 1)
                    return fail("boundary spin not +");
                continue;
            }
            if (open && s.sigma[static_cast<std::size_t>(i)] != s.sigma[static_cast<std::size_t>(j)])
                return fail("open edge outside the agreement set");
            const auto du = g.dual(i, d);
            if (!open && s.sigma[static_cast<std::size_t>(du[0])] != s.sigma[static_cast<std::size_t>(du[1])])
                return fail("closed edge crossed by an odd disagreement");
        }
    }
    return true;
}

HeightField height_from_spins(const SpinConfig& s) {
    const Geometry& g = *s.geometry;
    HeightField f;
    f.geometry = &g;
    f.h.assign(static_cast<std::size_t>(g.cells()), 0);
    std::vector<char> seen(static_cast<std::size_t>(g.cells()), 0);
    std::deque<int> queue;
    if (g.kind() == Geometry::Kind::even_domain) {
        for (int b : g.boundary_circuit()) {
            seen[static_cast<std::size_t>(b)] = 1;
            queue.push_back(b);
        }
    } else {
        seen[0] = 1;
        queue.push_back(0);
    }
    auto step = [&](int u, int v) {
        // h(odd) - h(even) = sigma_even * sigma_odd
        const int prod = s.sigma[static_cast<std::size_t>(u)] * s.sigma[static_cast<std::size_t>(v)];
        return g.is_even(u) ? prod : -prod;
    };
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : g.axis_neighbours(u)) {
            if (v < 0) continue;
            const int hv = f.h[static_cast<std::size_t>(u)] + step(u, v);
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                f.h[static_cast<std::size_t>(v)] = hv;
                queue.push_back(v);
            } else if (f.h[static_cast<std::size_t>(v)] != hv) {
                throw std::logic_error("inconsistent spin configuration");
            }
        }
    }
    return f;
}

std::vector<int> odd_components(const SpinConfig& s, int* count) {
    const Geometry& g = *s.geometry;
    DSU dsu(g.cells());
    for (int i = 0; i < g.cells(); ++i) {
        if (!g.in_domain(i) || !g.is_even(i)) continue;
        for (int d = 0; d < 2; ++d) {
            if (g.diagonal_neighbours(i)[static_cast<std::size_t>(d)] < 0 || g.boundary_edge(i, d) || s.open(i, d))
                continue;
            const auto du = g.dual(i, d);
            dsu.unite(du[0], du[1]);
        }
    }
    std::vector<int> id(static_cast<std::size_t>(g.cells()), -1);
    std::map<int, int> compact;
    for (int i = 0; i < g.cells(); ++i) {
        if (!g.in_domain(i) || g.is_even(i) || g.role(i) != FaceRole::interior) continue;
        const int r = dsu.find(i);
        auto it = compact.find(r);
        if (it == compact.end()) it = compact.emplace(r, static_cast<int>(compact.size())).first;
        id[static_cast<std::size_t>(i)] = it->second;
    }
    if (count) *count = static_cast<int>(compact.size());
    return id;
}

void resample_odd_spins(SpinConfig& s, CounterRng& rng) {
    int n = 0;
    const auto id = odd_components(s, &n);
    std::vector<signed char> coin(static_cast<std::size_t>(n));
    for (auto& c : coin) c = rng.coin() ? 1 : -1;
    for (std::size_t i = 0; i < id.size(); ++i)
        if (id[i] >= 0) s.sigma[i] = coin[static_cast<std::size_t>(id[i])];
}

// ---------------------------------------------------------------------------------------------
// Level-line tree

namespace {

// Components of odd cells plus one node for everything outside the domain; even edges in omega
// with spin `blocking` (0: any spin) separate.
DSU plane_components(const SpinConfig& s, int blocking) {
    const Geometry& g = *s.geometry;
    const int out = g.cells();
    DSU dsu(out + 1);
    auto node = [&](int c) { return c >= 0 && g.role(c) == FaceRole::interior ? c : out; };
    for (int i = 0; i < g.cells(); ++i) {
        if (!g.in_domain(i) || !g.is_even(i)) continue;
        for (int d = 0; d < 2; ++d) {
            if (g.diagonal_neighbours(i)[static_cast<std::size_t>(d)] < 0) continue;
            if (s.open(i, d) && (blocking == 0 || s.sigma[static_cast<std::size_t>(i)] == blocking)) continue;
            const auto du = g.dual(i, d);
            dsu.unite(node(du[0]), node(du[1]));
        }
    }
    return dsu;
}

}  // namespace

LevelLineTree build_level_line_tree(const SpinConfig& s, const HeightField* field) {
    const Geometry& g = *s.geometry;
    if (g.kind() != Geometry::Kind::even_domain) throw std::invalid_argument("level-line tree needs an even domain");
    const int n = g.cells();
    const int out = n;
    DSU all = plane_components(s, 0);
    DSU minus = plane_components(s, -1);  // complement of omega^-
    DSU plus = plane_components(s, +1);   // complement of omega^+
    auto node = [&](int c) { return c >= 0 && g.role(c) == FaceRole::interior ? c : out; };
    using V = LevelLineTree::Vertex;

    LevelLineTree t;
    t.geometry = &g;
    t.vertex_of.assign(static_cast<std::size_t>(n), -1);
    std::map<std::pair<int, int>, int> even_key;  // (sign, component) -> vertex

    auto even_component = [&](int i) {
        const int sign = s.sigma[static_cast<std::size_t>(i)];
        DSU& comp = sign > 0 ? minus : plus;
        const Face f = g.face(i);
        int r = -1;
        for (const auto& a : kAxis) {
            const int q = comp.find(node(g.index(f.x + a[0], f.y + a[1])));
            if (r >= 0 && q != r) throw std::logic_error("even face touches two components");
            r = q;
        }
        return std::pair<int, int>{sign, r};
    };
    auto add_even = [&](int i) {
        const auto key = even_component(i);
        auto it = even_key.find(key);
        if (it == even_key.end()) {
            it = even_key.emplace(key, static_cast<int>(t.vertices.size())).first;
            t.vertices.push_back({key.first > 0 ? V::Type::even_plus : V::Type::even_minus});
        }
        t.vertex_of[static_cast<std::size_t>(i)] = it->second;
    };
    add_even(g.boundary_circuit().front());
    if (t.vertices[0].type != V::Type::even_plus) throw std::logic_error("root is not a + vertex");
    for (int i = 0; i < n; ++i)
        if (g.in_domain(i) && g.is_even(i)) add_even(i);
    for (int b : g.boundary_circuit())
        if (t.vertex_of[static_cast<std::size_t>(b)] != 0) throw std::logic_error("boundary split across vertices");

    // Odd vertices, then the leftmost cell (min x, then min y) of each.
    std::map<int, int> odd_key;
    const int out_root = all.find(out);
    for (int i = 0; i < n; ++i) {
        if (!g.in_domain(i) || g.is_even(i)) continue;
        const int r = all.find(i);
        if (r == out_root) throw std::logic_error("odd face connected to the outside");
        auto it = odd_key.find(r);
        if (it == odd_key.end()) {
            it = odd_key.emplace(r, static_cast<int>(t.vertices.size())).first;
            t.vertices.push_back({V::Type::odd});
        }
        t.vertex_of[static_cast<std::size_t>(i)] = it->second;
    }
    std::map<int, int> best;
    for (int i = 0; i < n; ++i) {
        if (!g.in_domain(i) || g.is_even(i)) continue;
        const int v = t.vertex_of[static_cast<std::size_t>(i)];
        auto it = best.find(v);
        if (it == best.end() || g.face(i) < g.face(it->second)) best[v] = i;
    }
    for (const auto& [v, cell] : best) {
        const Face f = g.face(cell);
        const int left = g.index(f.x - 1, f.y);
        if (!g.in_domain(left)) throw std::logic_error("outer boundary face outside the domain");
        const int p = t.vertex_of[static_cast<std::size_t>(left)];
        t.vertices[static_cast<std::size_t>(v)].parent = p;
        // The even vertex of the opposite sign inside the same component of the plane minus
        // omega^{sign(p)} points here.
        const int psign = t.vertices[static_cast<std::size_t>(p)].type == V::Type::even_plus ? 1 : -1;
        DSU& comp = psign > 0 ? plus : minus;
        auto ek = even_key.find({-psign, comp.find(cell)});
        if (ek != even_key.end()) {
            auto& child = t.vertices[static_cast<std::size_t>(ek->second)];
            if (ek->second == 0) throw std::logic_error("root acquired a parent");
            if (child.parent >= 0) throw std::logic_error("even vertex with two parents");
            child.parent = v;
        }
    }
    for (std::size_t v = 1; v < t.vertices.size(); ++v)
        if (t.vertices[v].parent < 0) throw std::logic_error("non-root vertex without parent");

    // Depths, with cycle detection.
    std::vector<char> state(t.vertices.size(), 0);
    state[0] = 2;
    for (std::size_t v0 = 1; v0 < t.vertices.size(); ++v0) {
        std::vector<int> stack;
        int v = static_cast<int>(v0);
        while (state[static_cast<std::size_t>(v)] == 0) {
            state[static_cast<std::size_t>(v)] = 1;
            stack.push_back(v);
            v = t.vertices[static_cast<std::size_t>(v)].parent;
        }
        if (state[static_cast<std::size_t>(v)] == 1) throw std::logic_error("cycle in level-line tree");
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            auto& x = t.vertices[static_cast<std::size_t>(*it)];
            x.depth = t.vertices[static_cast<std::size_t>(x.parent)].depth + 1;
            state[static_cast<std::size_t>(*it)] = 2;
        }
    }
    for (std::size_t v = 1; v < t.vertices.size(); ++v) ++t.vertices[static_cast<std::size_t>(t.vertices[v].parent)].children;
    for (const auto& x : t.vertices) {
        const int want = x.type == V::Type::even_plus ? 0 : x.type == V::Type::even_minus ? 2 : -1;
        if (want >= 0 ? x.depth % 4 != want : x.depth % 2 != 1) throw std::logic_error("depth parity violated");
        if (x.type == V::Type::odd && x.children > 1) throw std::logic_error("odd vertex with two children");
    }
    if (field) {
        std::vector<int> hv(t.vertices.size(), INT_MIN);
        for (int i = 0; i < n; ++i) {
            const int v = t.vertex_of[static_cast<std::size_t>(i)];
            if (v < 0) continue;
            const int h = field->h[static_cast<std::size_t>(i)];
            if (hv[static_cast<std::size_t>(v)] == INT_MIN) hv[static_cast<std::size_t>(v)] = h;
            if (hv[static_cast<std::size_t>(v)] != h) throw std::logic_error("height not constant on a tree vertex");
        }
    }
    return t;
}

int LevelLineTree::depth(Face f) const {
    return vertices[static_cast<std::size_t>(vertex_of[static_cast<std::size_t>(geometry->index(f.x, f.y))])].depth;
}

int LevelLineTree::branching(Face u, Face v) const {
    int a = vertex_of[static_cast<std::size_t>(geometry->index(u.x, u.y))];
    int b = vertex_of[static_cast<std::size_t>(geometry->index(v.x, v.y))];
    if (a < 0 || b < 0) return 0;
    while (vertices[static_cast<std::size_t>(a)].depth > vertices[static_cast<std::size_t>(b)].depth)
        a = vertices[static_cast<std::size_t>(a)].parent;
    while (vertices[static_cast<std::size_t>(b)].depth > vertices[static_cast<std::size_t>(a)].depth)
        b = vertices[static_cast<std::size_t>(b)].parent;
    while (a != b) {
        a = vertices[static_cast<std::size_t>(a)].parent;
        b = vertices[static_cast<std::size_t>(b)].parent;
    }
    return vertices[static_cast<std::size_t>(a)].depth;
}

int LevelLineTree::odd_vertex_count() const {
    return static_cast<int>(std::count_if(vertices.begin(), vertices.end(),
                                          [](const Vertex& v) { return v.type == Vertex::Type::odd; }));
}

int conditional_covariance(const LevelLineTree& t, Face u, Face v) {
    const int psi = t.branching(u, v);
    const int k = psi / 2;
    if (psi % 2 == 0) return 4 * k;
    if (t.depth(u) == psi && t.depth(v) == psi) return 4 * k + 1;
    return 4 * k + 2;
}

std::vector<int> tree_heights(const LevelLineTree& t, const std::vector<int>& coins) {
    std::vector<int> order(t.vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return t.vertices[static_cast<std::size_t>(a)].depth < t.vertices[static_cast<std::size_t>(b)].depth;
    });
    std::vector<int> coin_of(t.vertices.size(), 0);
    std::size_t k = 0;
    for (std::size_t v = 0; v < t.vertices.size(); ++v)
        if (t.vertices[v].type == LevelLineTree::Vertex::Type::odd) coin_of[v] = coins.at(k++);
    std::vector<int> hv(t.vertices.size(), 0);
    for (int v : order) {
        const auto& x = t.vertices[static_cast<std::size_t>(v)];
        if (x.parent < 0) continue;
        const int hp = hv[static_cast<std::size_t>(x.parent)];
        if (x.type == LevelLineTree::Vertex::Type::odd) {
            hv[static_cast<std::size_t>(v)] = hp + coin_of[static_cast<std::size_t>(v)];
        } else {
            const int pp = t.vertices[static_cast<std::size_t>(x.parent)].parent;
            hv[static_cast<std::size_t>(v)] = 2 * hp - hv[static_cast<std::size_t>(pp)];
        }
    }
    std::vector<int> h(t.vertex_of.size(), 0);
    for (std::size_t i = 0; i < h.size(); ++i)
        if (t.vertex_of[i] >= 0) h[i] = hv[static_cast<std::size_t>(t.vertex_of[i])];
    return h;
}

// ---------------------------------------------------------------------------------------------
// Alternating crossings and circuits

Region Region::rectangle(int x0, int y0, int x1, int y1) {
    if (x1 < x0 || y1 < y0) throw std::invalid_argument("empty rectangle");
    Region r;
    r.x0 = x0;
    r.y0 = y0;
    r.x1 = x1;
    r.y1 = y1;
    return r;
}

Region Region::annulus(Face centre, int r, int R) {
    if (r < 1 || R <= r) throw std::invalid_argument("annulus needs 1 <= r < R");
    Region a;
    a.centre = centre;
    a.r = r;
    a.R = R;
    return a;
}

namespace {

int greedy_alternation(const std::vector<int>& labels) {
    int want = 1, n = 0;
    for (int l : labels)
        if (l == want) {
            ++n;
            want = -want;
        }
    return n - n % 2;
}

// Clusters of omega edges with both endpoints satisfying `keep` (given face coordinates).
struct Clusters {
    DSU dsu;
    std::vector<char> has_edge;
    explicit Clusters(int n) : dsu(n), has_edge(static_cast<std::size_t>(n), 0) {}
};

Clusters omega_clusters(const SpinConfig& s, const std::vector<Face>& faces, const std::function<bool(Face)>& keep) {
    const Geometry& g = *s.geometry;
    Clusters c(g.cells());
    for (const Face f : faces) {
        const int i = g.index(f.x, f.y);
        if (!g.in_domain(i) || !g.is_even(i)) continue;
        for (int d = 0; d < 2; ++d) {
            if (!s.open(i, d)) continue;
            const Face o{f.x + (d == 0 ? 1 : -1), f.y + 1};
            if (!keep(o)) continue;
            const int j = g.index(o.x, o.y);
            c.dsu.unite(i, j);
            c.has_edge[static_cast<std::size_t>(i)] = c.has_edge[static_cast<std::size_t>(j)] = 1;
        }
    }
    return c;
}

int crossing_count(const SpinConfig& s, const Region& reg, bool horizontal) {
    const Geometry& g = *s.geometry;
    std::vector<Face> faces;
    for (int y = reg.y0; y <= reg.y1; ++y)
        for (int x = reg.x0; x <= reg.x1; ++x) faces.push_back({x, y});
    auto keep = [&](Face f) { return f.x >= reg.x0 && f.x <= reg.x1 && f.y >= reg.y0 && f.y <= reg.y1; };
    Clusters cl = omega_clusters(s, faces, keep);
    std::set<int> target;
    for (const Face f : faces) {
        const bool on = horizontal ? f.x == reg.x1 : f.y == reg.y0;
        const int i = g.index(f.x, f.y);
        if (on && g.in_domain(i) && cl.has_edge[static_cast<std::size_t>(i)]) target.insert(cl.dsu.find(i));
    }
    std::vector<int> labels;
    if (horizontal) {
        for (int y = reg.y1; y >= reg.y0; --y) {
            const int i = g.index(reg.x0, y);
            if (!g.in_domain(i) || !g.is_even(i) || !cl.has_edge[static_cast<std::size_t>(i)]) continue;
            labels.push_back(target.count(cl.dsu.find(i)) ? s.sigma[static_cast<std::size_t>(i)] : 0);
        }
    } else {
        for (int x = reg.x0; x <= reg.x1; ++x) {
            const int i = g.index(x, reg.y1);
            if (!g.in_domain(i) || !g.is_even(i) || !cl.has_edge[static_cast<std::size_t>(i)]) continue;
            labels.push_back(target.count(cl.dsu.find(i)) ? s.sigma[static_cast<std::size_t>(i)] : 0);
        }
    }
    return greedy_alternation(labels);
}

int cheb(int dx, int dy) { return std::max(std::abs(dx), std::abs(dy)); }

int circuit_count(const SpinConfig& s, const Region& reg) {
    const Geometry& g = *s.geometry;
    const Face c = reg.centre;
    const int ext = reg.R + 2;
    const int side = 2 * ext + 1;
    auto in_annulus = [&](int dx, int dy) {
        const int n = cheb(dx, dy);
        return n >= reg.r && n <= reg.R;
    };
    // Even edge crossed by the odd move p -> p + (dx, dy), as (lower cell, direction, endpoints in A).
    auto blocked = [&](int px, int py, int dx, int dy, int sign) {
        const int e1x = px + dx, e1y = py, e2x = px, e2y = py + dy;
        if (!in_annulus(e1x, e1y) || !in_annulus(e2x, e2y)) return false;
        int lx, ly, d;
        if (dy > 0) {
            lx = e1x;
            ly = e1y;
            d = -dx == 1 ? 0 : 1;
        } else {
            lx = e2x;
            ly = e2y;
            d = dx == 1 ? 0 : 1;
        }
        const int cell = g.index(c.x + lx, c.y + ly);
        if (!g.in_domain(cell) || !g.is_even(cell)) return false;
        return s.open(cell, d) && s.sigma[static_cast<std::size_t>(cell)] == sign;
    };
    auto odd_site = [&](int dx, int dy) { return (((c.x + dx + c.y + dy) % 2) + 2) % 2 == 1; };
    std::vector<char> reached(static_cast<std::size_t>(side * side), 0);
    auto at = [&](int dx, int dy) -> char& { return reached[static_cast<std::size_t>((dy + ext) * side + dx + ext)]; };
    std::deque<std::pair<int, int>> queue;
    for (int dy = -ext; dy <= ext; ++dy)
        for (int dx = -ext; dx <= ext; ++dx)
            if (odd_site(dx, dy) && cheb(dx, dy) > reg.R) {
                at(dx, dy) = 1;
                queue.emplace_back(dx, dy);
            }
    // The hole is the odd sites strictly inside radius r; with r = 1 around an even face, the four
    // odd faces next to it are joined through edges at the centre and stand in for it.
    const int hole_radius = reg.r == 1 && !odd_site(0, 0) ? 2 : reg.r;
    int found = 0;
    for (int sign = 1; found <= ext; sign = -sign) {
        std::deque<std::pair<int, int>> q = queue;
        bool hole = false;
        while (!q.empty()) {
            const auto [px, py] = q.front();
            q.pop_front();
            if (cheb(px, py) < hole_radius) hole = true;
            for (const auto& dd : kDiag) {
                const int nx = px + dd[0], ny = py + dd[1];
                if (cheb(nx, ny) > ext || at(nx, ny)) continue;
                if (blocked(px, py, dd[0], dd[1], sign)) continue;
                at(nx, ny) = 1;
                q.emplace_back(nx, ny);
                queue.emplace_back(nx, ny);
            }
        }
        if (hole) break;
        ++found;
    }
    return found - found % 2;
}

int arm_count(const SpinConfig& s, const Region& reg) {
    const Geometry& g = *s.geometry;
    const Face c = reg.centre;
    std::vector<Face> faces;
    for (int dy = -reg.R; dy <= reg.R; ++dy)
        for (int dx = -reg.R; dx <= reg.R; ++dx)
            if (cheb(dx, dy) >= reg.r) faces.push_back({c.x + dx, c.y + dy});
    auto keep = [&](Face f) {
        const int n = cheb(f.x - c.x, f.y - c.y);
        return n >= reg.r && n <= reg.R;
    };
    Clusters cl = omega_clusters(s, faces, keep);
    std::map<int, double> inner_angle;
    std::set<int> outer;
    for (const Face f : faces) {
        const int i = g.index(f.x, f.y);
        if (!g.in_domain(i) || !cl.has_edge[static_cast<std::size_t>(i)]) continue;
        const int n = cheb(f.x - c.x, f.y - c.y);
        const int root = cl.dsu.find(i);
        if (n == reg.R) outer.insert(root);
        if (n == reg.r) {
            const double a = std::atan2(f.y - c.y, f.x - c.x);
            auto it = inner_angle.find(root);
            if (it == inner_angle.end() || a < it->second) inner_angle[root] = a;
        }
    }
    std::vector<std::pair<double, int>> arms;
    for (const auto& [root, a] : inner_angle)
        if (outer.count(root)) arms.emplace_back(a, s.sigma[static_cast<std::size_t>(root)]);
    std::sort(arms.begin(), arms.end());
    if (arms.size() < 2) return 0;
    int changes = 0;
    for (std::size_t k = 0; k < arms.size(); ++k) changes += arms[k].second != arms[(k + 1) % arms.size()].second;
    return changes;
}

}  // namespace

int count_alternating(const SpinConfig& s, const Region& region, AltMode mode) {
    switch (mode) {
        case AltMode::hori: return crossing_count(s, region, true);
        case AltMode::verti: return crossing_count(s, region, false);
        case AltMode::circuit: return circuit_count(s, region);
        case AltMode::arm: return arm_count(s, region);
    }
    return 0;
}

// ---------------------------------------------------------------------------------------------
// Estimators

Estimate batch_means(const std::vector<double>& xs, int batches) {
    Estimate e;
    e.samples = static_cast<long>(xs.size());
    if (xs.empty()) {
        e.sufficient = false;
        e.note = "no samples";
        return e;
    }
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (static_cast<long>(xs.size()) < 2L * batches) {
        e.sufficient = false;
        e.note = "fewer than two samples per batch";
        batches = std::max(1, static_cast<int>(xs.size() / 2));
    }
    const std::size_t b = xs.size() / static_cast<std::size_t>(batches);
    double var = 0.0;
    for (double x : xs) var += (x - e.mean) * (x - e.mean);
    var /= static_cast<double>(xs.size());
    std::vector<double> bm(static_cast<std::size_t>(batches), 0.0);
    for (int k = 0; k < batches; ++k) {
        for (std::size_t j = 0; j < b; ++j) bm[static_cast<std::size_t>(k)] += xs[static_cast<std::size_t>(k) * b + j];
        bm[static_cast<std::size_t>(k)] /= static_cast<double>(b);
    }
    const double used = std::accumulate(bm.begin(), bm.end(), 0.0) / batches;
    double s2 = 0.0;
    for (double m : bm) s2 += (m - used) * (m - used);
    s2 = batches > 1 ? s2 / (batches - 1) : 0.0;
    e.batches = batches;
    e.stderr_ = std::sqrt(s2 / batches);
    e.tau = var > 0 ? static_cast<double>(b) * s2 / (2.0 * var) : 0.5;
    return e;
}

Estimate merge_chains(const std::vector<Estimate>& parts) {
    Estimate e;
    double n = 0.0;
    for (const auto& p : parts) n += static_cast<double>(p.samples);
    if (n == 0) {
        e.sufficient = false;
        e.note = "no samples";
        return e;
    }
    double var = 0.0, tau = 0.0;
    for (const auto& p : parts) {
        const double w = static_cast<double>(p.samples) / n;
        e.mean += w * p.mean;
        var += w * w * p.stderr_ * p.stderr_;
        tau += w * p.tau;
        e.batches += p.batches;
        e.sufficient = e.sufficient && p.sufficient;
        if (!p.note.empty() && e.note.empty()) e.note = p.note;
    }
    e.samples = static_cast<long>(n);
    e.stderr_ = std::sqrt(var);
    e.tau = tau;
    return e;
}

std::vector<Estimate> run_chains(const Geometry& g, const MCParams& p, const std::vector<FieldObservable>& obs) {
    if (p.chains < 1 || p.samples < 1 || p.sweeps_per_sample < 1 || p.burn_in < 0)
        throw std::invalid_argument("invalid chain budget");
    const std::size_t nobs = obs.size();
    std::vector<std::vector<Estimate>> per_chain(static_cast<std::size_t>(p.chains));
    auto run_one = [&](int chain) {
        CounterRng rng(p.seed, static_cast<std::uint64_t>(chain));
        HeightField f = flat_field(g);
        f.seed = p.seed;
        f.stream = static_cast<std::uint64_t>(chain);
        sweeps(f, p.model.c, rng, p.burn_in);
        std::vector<std::vector<double>> xs(nobs, std::vector<double>(static_cast<std::size_t>(p.samples)));
        for (long k = 0; k < p.samples; ++k) {
            sweeps(f, p.model.c, rng, p.sweeps_per_sample);
            for (std::size_t o = 0; o < nobs; ++o) xs[o][static_cast<std::size_t>(k)] = obs[o](f);
        }
        auto& out = per_chain[static_cast<std::size_t>(chain)];
        for (std::size_t o = 0; o < nobs; ++o) out.push_back(batch_means(xs[o]));
    };
    int threads = p.threads > 0 ? p.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, p.chains);
    if (threads <= 1) {
        for (int c = 0; c < p.chains; ++c) run_one(c);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (int c = t; c < p.chains; c += threads) run_one(c);
            });
        for (auto& th : pool) th.join();
    }
    std::vector<Estimate> result;
    for (std::size_t o = 0; o < nobs; ++o) {
        std::vector<Estimate> parts;
        for (const auto& pc : per_chain) parts.push_back(pc[o]);
        Estimate e = merge_chains(parts);
        if (p.target_stderr > 0 && e.stderr_ > p.target_stderr) {
            e.sufficient = false;
            e.note = "requested precision not reached";
        }
        result.push_back(e);
    }
    return result;
}

double height_product(const HeightField& f, const std::vector<Face>& points) {
    double prod = 1.0;
    for (std::size_t i = 0; i + 1 < points.size(); i += 2) prod *= f.at(points[i + 1]) - f.at(points[i]);
    return prod;
}

Estimate estimate_correlator(const Geometry& g, const MCParams& p, const std::vector<Face>& points) {
    if (points.empty() || points.size() % 2) throw std::invalid_argument("points must come in pairs");
    for (const Face f : points) {
        const int i = g.index(f.x, f.y);
        if (!g.in_domain(i)) throw std::invalid_argument("point outside the geometry");
        if (g.boundary_distance(f) < p.margin) throw std::invalid_argument("point closer to the boundary than the margin");
    }
    return run_chains(g, p, {[points](const HeightField& f) { return height_product(f, points); }}).front();
}

// ---------------------------------------------------------------------------------------------
// Flip domination

namespace {

int even_ceiling(int h) { return h % 2 == 0 ? h : h + 1; }

std::pair<double, double> cdf_gaps(const std::vector<int>& X, const std::vector<int>& Y) {
    // Returns (max (F_Y - F_X)^+, max (F_X - F_Y)^+) over all thresholds.
    std::vector<int> xs = X, ys = Y;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    std::vector<int> ts = xs;
    ts.insert(ts.end(), ys.begin(), ys.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const double n = static_cast<double>(X.size());
    double v = 0.0, a = 0.0;
    for (int t : ts) {
        const double fx = static_cast<double>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin()) / n;
        const double fy = static_cast<double>(std::upper_bound(ys.begin(), ys.end(), t) - ys.begin()) / n;
        v = std::max(v, fy - fx);
        a = std::max(a, fx - fy);
    }
    return {v, a};
}

}  // namespace

DominanceReport flip_domination_test(const std::vector<HeightField>& samples, const std::vector<Face>& circuit,
                                     Face probe, const std::function<bool(const HeightField&)>& event, int m_shift,
                                     double min_mass, int permutations, std::uint64_t seed) {
    DominanceReport r;
    if (circuit.empty()) throw std::invalid_argument("empty circuit");
    std::vector<int> X, Y;
    int m_last = 0;
    for (const auto& f : samples) {
        if (event && !event(f)) continue;
        int m = INT_MIN;
        for (const Face c : circuit) m = std::max(m, even_ceiling(f.at(c)));
        m += m_shift;
        m_last = m;
        const int h = f.at(probe);
        X.push_back(h - m);
        Y.push_back(m - h);
    }
    r.conditioned = static_cast<long>(X.size());
    r.m = m_last;
    if (X.empty() || static_cast<double>(X.size()) < min_mass * static_cast<double>(samples.size())) {
        r.conclusive = false;
        r.note = "conditioning event too rare";
        return r;
    }
    std::tie(r.violation, r.advantage) = cdf_gaps(X, Y);
    CounterRng rng(seed, 0);
    int exceed = 0;
    std::vector<int> px(X.size()), py(Y.size());
    for (int k = 0; k < permutations; ++k) {
        for (std::size_t i = 0; i < X.size(); ++i) {
            const bool swap = rng.coin();
            px[i] = swap ? Y[i] : X[i];
            py[i] = swap ? X[i] : Y[i];
        }
        if (cdf_gaps(px, py).first >= r.violation) ++exceed;
    }
    r.p_value = (1.0 + exceed) / (1.0 + permutations);
    return r;
}

}  // namespace sixv::mc
