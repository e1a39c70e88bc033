#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sixv/correlation.hpp"

using namespace sixv;

namespace {

const double kCs[] = {1.0, std::numbers::sqrt2, std::sqrt(3.0), 2.0};

// Line operator for a product of vertical arrows, by enumerating every vertical assignment.
Eigen::MatrixXd brute_line_matrix(const BasisIndex& basis, Mask monomial, double c) {
    const int L = basis.L();
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index f = 0; f < n; ++f)
        for (Eigen::Index t = 0; t < n; ++t) {
            const Mask from = basis.config(f), to = basis.config(t);
            double sum = 0.0;
            for (Mask a = 0; a < (Mask{1} << L); ++a) {
                bool ok = true;
                int cv = 0;
                for (int j = 0; j < L && ok; ++j) {
                    const int k = (from >> j) & 1u ? 1 : -1;
                    const int kp = (to >> j) & 1u ? 1 : -1;
                    const int lo = (a >> ((j + L - 1) % L)) & 1u ? 1 : -1;
                    const int up = (a >> j) & 1u ? 1 : -1;
                    ok = (k + lo == kp + up);
                    cv += (k != kp);
                }
                if (!ok) continue;
                double prod = std::pow(c, cv);
                for (int j = 0; j < L; ++j)
                    if ((monomial >> j) & 1u) prod *= (a >> j) & 1u ? 1.0 : -1.0;
                sum += prod;
            }
            m(t, f) = sum;
        }
    return m;
}

Eigen::MatrixXd diag_matrix(const BasisIndex& basis, Mask kappa) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 1.0;
        for (int j = 0; j < basis.L(); ++j)
            if ((kappa >> j) & 1u) s *= (basis.config(i) >> j) & 1u ? 1.0 : -1.0;
        d(i, i) = s;
    }
    return d;
}

// Dense reference for v0^T (chain) v0 with v0 from a dense eigensolve.
double dense_cylinder(const BasisIndex& basis, double c, const ArrowMonomial& mono) {
    const Eigen::MatrixXd t = brute_line_matrix(basis, 0, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::Index top = es.eigenvalues().size() - 1;
    const double lambda0 = es.eigenvalues()[top];
    Eigen::VectorXd v0 = es.eigenvectors().col(top);
    if (v0.sum() < 0) v0 = -v0;
    if (mono.empty()) return 1.0;
    Eigen::VectorXd s = v0;
    const int x0 = mono.min_column(), x1 = mono.max_column();
    for (int x = x0; x <= x1; ++x) {
        if (x > x0) {
            const auto it = mono.lines.find(x);
            s = brute_line_matrix(basis, it == mono.lines.end() ? 0 : it->second, c) * s / lambda0;
        }
        if (const auto it = mono.columns.find(x); it != mono.columns.end()) s = diag_matrix(basis, it->second) * s;
    }
    return v0.dot(s);
}

ArrowMonomial mono_of(std::initializer_list<Arrow> arrows, int L) {
    ArrowMonomial m;
    for (const Arrow& a : arrows) m.multiply(a, L);
    return m;
}

}  // namespace

TEST(HeightSteps, PathShape) {
    const auto s = height_steps({0, 0}, {2, 1});
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].arrow.kind, ArrowKind::vertical);
    EXPECT_EQ(s[0].arrow.x, 1);
    EXPECT_EQ(s[0].sign, -1);
    EXPECT_EQ(s[1].arrow.x, 2);
    EXPECT_EQ(s[2].arrow.kind, ArrowKind::horizontal);
    EXPECT_EQ(s[2].arrow.x, 2);
    EXPECT_EQ(s[2].arrow.y, 1);
    EXPECT_EQ(s[2].sign, 1);
    const auto back = height_steps({2, 1}, {0, 0});
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0].sign, 1);
    EXPECT_EQ(back[2].sign, -1);
    EXPECT_TRUE(height_steps({3, 3}, {3, 3}).empty());
}

TEST(ArrowMonomial, SquaresCancel) {
    ArrowMonomial m;
    m.multiply({ArrowKind::horizontal, 0, 1}, 4);
    m.multiply({ArrowKind::horizontal, 0, 5}, 4);
    EXPECT_TRUE(m.empty());
    m.multiply({ArrowKind::vertical, 2, 0}, 4);
    EXPECT_EQ(m.min_column(), 1);
    EXPECT_EQ(m.max_column(), 2);
    EXPECT_EQ(m.shifted(3).lines.begin()->first, 5);
}

// The height convention must close around every vertex of every ice configuration,
// and the opposite sign for vertical crossings must not.
TEST(HeightConvention, ClosesAroundVertices) {
    const auto p = ModelParams::from_c(1.0);
    bool other_fails = false;
    const TorusObservable check = [&](const TorusConfig& cfg) {
        for (int x = 0; x < cfg.M; ++x)
            for (int y = 0; y < cfg.L; ++y) {
                // Faces around vertex (line x, height y): (x-1,y-1),(x,y-1),(x,y),(x-1,y).
                const int ours = -cfg.vertical(x, y - 1) + cfg.horizontal(x, y) + cfg.vertical(x, y) -
                                 cfg.horizontal(x - 1, y);
                const int other = cfg.vertical(x, y - 1) + cfg.horizontal(x, y) - cfg.vertical(x, y) -
                                  cfg.horizontal(x - 1, y);
                if (ours != 0) ADD_FAILURE() << "height does not close";
                if (other != 0) other_fails = true;
            }
        return 1.0;
    };
    torus_enumerate(3, 4, p, TorusSector::all, {check});
    EXPECT_TRUE(other_fails);
}

TEST(TorusTrace, BruteForceMatchesTransferTrace) {
    const std::pair<int, int> sizes[] = {{1, 2}, {2, 4}, {3, 4}, {2, 6}};
    for (double c : kCs) {
        const auto p = ModelParams::from_c(c);
        for (auto [M, L] : sizes) {
            const double Z = torus_enumerate(M, L, p, TorusSector::balanced, {}).Z;
            const BasisIndex basis = enumerate_balanced(L);
            const Eigen::MatrixXd t = dense_transfer(basis, p);
            Eigen::MatrixXd tm = Eigen::MatrixXd::Identity(t.rows(), t.cols());
            for (int i = 0; i < M; ++i) tm = tm * t;
            EXPECT_NEAR(Z, tm.trace(), 1e-12 * Z) << M << "x" << L << " c=" << c;
            const TorusChain chain(M, L, p);
            EXPECT_NEAR(chain.partition_trace() * std::pow(chain.lambda_scale(), M), Z, 1e-12 * Z);
        }
    }
}

TEST(TorusBruteForce, Basics) {
    const auto p = ModelParams::from_c(std::sqrt(3.0));
    EXPECT_DOUBLE_EQ(torus_brute_force(2, 4, p, [](const TorusConfig&) { return 1.0; }), 1.0);
    const double h = torus_brute_force(2, 4, p, [](const TorusConfig& c) {
        return double(c.height_difference({0, 0}, {1, 2}));
    });
    EXPECT_NEAR(h, 0.0, 1e-14);
    EXPECT_THROW(torus_enumerate(6, 6, p, TorusSector::balanced, {}), std::invalid_argument);
}

TEST(TorusChain, MatchesBruteForceObservables) {
    for (double c : {1.0, 2.0}) {
        const auto p = ModelParams::from_c(c);
        for (auto [M, L] : {std::pair{3, 4}, std::pair{2, 6}, std::pair{4, 4}}) {
            const TorusChain chain(M, L, p);
            const std::pair<Face, Face> pairs[] = {{{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{0, 0}, {2, 1}}, {{1, 2}, {0, 0}}};
            for (const auto& [u, v] : pairs)
                for (const auto& [w, z] : pairs) {
                    const Face w2{w.x + 1, w.y + 1}, z2{z.x + 1, z.y + 1};
                    const double brute = torus_brute_force(M, L, p, [&](const TorusConfig& cfg) {
                        return double(cfg.height_difference(u, v) * cfg.height_difference(w2, z2));
                    });
                    const ArrowPolynomial poly =
                        ArrowPolynomial::height_difference(u, v, L) * ArrowPolynomial::height_difference(w2, z2, L);
                    EXPECT_NEAR(chain.expectation(poly), brute, 1e-11) << M << "x" << L << " c=" << c;
                }
        }
    }
}

TEST(Cylinder, MatchesDenseChain) {
    for (double c : kCs) {
        const auto p = ModelParams::from_c(c);
        for (int L : {4, 6}) {
            const EigenSystem sys = build_and_codiagonalize(L, p);
            const ArrowMonomial monos[] = {
                mono_of({{ArrowKind::vertical, 1, 0}, {ArrowKind::vertical, 3, 2}}, L),
                mono_of({{ArrowKind::horizontal, 0, 0}, {ArrowKind::horizontal, 2, 1}}, L),
                mono_of({{ArrowKind::vertical, 1, 0}, {ArrowKind::horizontal, 1, 3}}, L),
                mono_of({{ArrowKind::vertical, 0, 0}, {ArrowKind::vertical, 0, 1},
                         {ArrowKind::horizontal, 2, 1}, {ArrowKind::vertical, 3, 3}}, L),
                mono_of({{ArrowKind::horizontal, -1, 0}}, L),
            };
            for (const auto& m : monos)
                EXPECT_NEAR(cylinder_expectation(sys, m), dense_cylinder(sys.basis(), c, m), 1e-12) << L;
        }
    }
}

TEST(Cylinder, UnitStepSquaredIsOne) {
    const EigenSystem sys = build_and_codiagonalize(6, ModelParams::from_c(1.5));
    const ArrowPolynomial d = ArrowPolynomial::height_difference({0, 0}, {1, 0}, 6);
    EXPECT_NEAR(cylinder_expectation(sys, d * d), 1.0, 1e-12);
    const ArrowPolynomial e = ArrowPolynomial::height_difference({0, 0}, {0, 1}, 6);
    EXPECT_NEAR(cylinder_expectation(sys, e * e), 1.0, 1e-12);
}

// Torus correlations approach the cylinder ones at rate |Lambda_1|^M.
TEST(Cylinder, TorusLimit) {
    const int L = 4;
    const auto p = ModelParams::from_c(2.0);
    const EigenSystem sys = build_and_codiagonalize(L, p);
    double lambda1 = 0.0;
    for (std::size_t k = 1; k < sys.size(); ++k) lambda1 = std::max(lambda1, std::abs(sys.Lambda(k)));
    EXPECT_NEAR(lambda1, 7.0 / 13.0, 1e-12);
    DirectCorrelator cyl = DirectCorrelator::cylinder(sys);
    const PointQuad quads[] = {{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}}, {{{0, 0}, {0, 1}, {1, 0}, {1, 1}}},
                               {{{0, 0}, {1, 2}, {2, 1}, {3, 3}}}};
    for (int M : {12, 16, 24, 32, 48}) {
        const TorusChain chain(M, L, p);
        DirectCorrelator tor = DirectCorrelator::torus(chain, L);
        for (const auto& q : quads) {
            const double diff = std::abs(cyl.two_point(q) - tor.two_point(q));
            EXPECT_LE(diff, 10.0 * std::pow(lambda1, M)) << M;
            if (M >= 32) EXPECT_LE(diff, 1e-8) << M;
        }
    }
}

TEST(Slab, Validation) {
    const EigenSystem sys = build_and_codiagonalize(4, ModelParams::from_c(1.0));
    SlabObservable x{Side::left, 2, {{{0, 0}, {-1, 1}}}};
    EXPECT_NO_THROW(x.validate(3));
    EXPECT_THROW(x.validate(1), std::invalid_argument);
    SlabObservable bad{Side::left, 2, {{{0, 0}, {1, 1}}}};
    EXPECT_THROW(bad.validate(3), std::invalid_argument);
    SlabObservable zero{Side::right, 0, {{{0, 0}, {0, 1}}}};
    EXPECT_THROW(zero.validate(3), std::invalid_argument);
    const SlabObservable r = x.reflected();
    EXPECT_EQ(r.side, Side::right);
    EXPECT_EQ(r.factors[0].second.x, 1);
    EXPECT_NO_THROW(r.validate(3));
    EXPECT_NEAR((slab_state(SlabObservable{Side::left, 0, {}}, sys) - sys.v0()).norm(), 0.0, 1e-15);
}
