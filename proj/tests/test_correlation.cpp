#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "sixv/correlation.hpp"

using namespace sixv;

namespace {
constexpr double kPi = std::numbers::pi;

PointQuad quad(Face a, Face b, Face c, Face d) { return PointQuad{{a, b, c, d}}; }
}  // namespace

TEST(PointQuad, StepsAndOrdering) {
    const PointQuad q = quad({0, 0}, {2, 1}, {3, -1}, {5, 0});
    EXPECT_EQ(q.pairs(), 2);
    EXPECT_EQ(q.step(0), (Face{2, 1}));
    EXPECT_EQ(q.gap(0), (Face{1, -2}));
    EXPECT_EQ(q.step(1), (Face{2, 1}));
    EXPECT_TRUE(q.horizontally_ordered());
    EXPECT_FALSE(quad({0, 0}, {2, 1}, {1, 0}, {5, 0}).horizontally_ordered());
}

TEST(Chi, Examples) {
    EXPECT_EQ(chi_discrete(quad({0, 0}, {0, 0}, {2, 0}, {3, 1}), 0.4, 1.0), cplx(0.0));
    EXPECT_NEAR(std::abs(chi_discrete(quad({0, 0}, {1, 2}, {3, 1}, {4, 4}), 0.0, 0.0)), 0.0, 1e-15);
    for (int l : {0, 1, 3, 7})
        for (double a : {0.1, 0.9, 1.7}) {
            const cplx v = chi_discrete(quad({0, 0}, {1, 0}, {1 + l, 0}, {2 + l, 0}), a, 0.3);
            EXPECT_NEAR(std::abs(v - (-a * a * std::pow(1 - a, l))), 0.0, 1e-14);
        }
}

TEST(SpectralCorrelator, Examples) {
    const EigenSystem sys = build_and_codiagonalize(6, ModelParams::from_c(std::sqrt(3.0)));
    const SpectralMeasure mu = spectral_measure(sys);
    EXPECT_NEAR(cylinder_two_point_spectral(mu, quad({0, 0}, {0, 0}, {1, 0}, {2, 3})), 0.0, 1e-15);
    // Negative whenever the middle gap is even: chi = -(1-a)^l (1-(1-a)^k)^2 <= 0.
    for (int k = 1; k <= 6; ++k)
        for (int l = 0; l <= 6; l += 2)
            EXPECT_LT(cylinder_two_point_spectral(mu, quad({0, 0}, {k, 0}, {k + l, 0}, {2 * k + l, 0})), 0.0);
    // With an odd middle gap atoms at a > 1 flip the sign of chi; at c = sqrt(3) the k = 1 value is positive.
    EXPECT_GT(cylinder_two_point_spectral(mu, quad({0, 0}, {1, 0}, {2, 0}, {3, 0})), 0.0);
    const PointQuad q = quad({0, 0}, {1, 0}, {2, 0}, {3, 0});
    EXPECT_NEAR(cylinder_two_point_spectral(mu, q), cylinder_two_point_direct(sys, q), 1e-10);
    EXPECT_THROW(cylinder_two_point_spectral(mu, quad({0, 0}, {2, 0}, {1, 0}, {3, 0})), std::invalid_argument);
}

TEST(SpectralCorrelator, AgreesWithDirectInWindow) {
    for (double c : {1.0, 2.0}) {
        const int L = 4;
        const EigenSystem sys = build_and_codiagonalize(L, ModelParams::from_c(c));
        const SpectralMeasure mu = spectral_measure(sys);
        DirectCorrelator direct = DirectCorrelator::cylinder(sys);
        for (int x1 = 0; x1 < 3; ++x1)
            for (int x1p = 0; x1 + x1p < 4; ++x1p)
                for (int x2 = 0; x1 + x1p + x2 < 6; ++x2)
                    for (int y1 = 0; y1 < L; ++y1)
                        for (int y1p = 0; y1p < L; ++y1p)
                            for (int y2 = 0; y2 < L; ++y2) {
                                const Face u1{0, 0}, u1p{x1, y1}, u2{x1 + x1p, y1 + y1p}, u2p{x1 + x1p + x2, y1 + y1p + y2};
                                const PointQuad q = quad(u1, u1p, u2, u2p);
                                EXPECT_NEAR(cylinder_two_point_spectral(mu, q), direct.two_point(q), 1e-10);
                            }
    }
}

TEST(DirectCorrelator, AdditivityAndSymmetry) {
    const EigenSystem sys = build_and_codiagonalize(6, ModelParams::from_c(std::sqrt(3.0)));
    DirectCorrelator d = DirectCorrelator::cylinder(sys);
    const Face a{0, 0}, b{1, 2}, b2{2, 5}, u{3, 1}, v{5, 0};
    EXPECT_NEAR(d.two_point(quad(a, b, u, v)) + d.two_point(quad(b, b2, u, v)), d.two_point(quad(a, b2, u, v)), 1e-12);
    EXPECT_NEAR(d.two_point(quad(b, a, u, v)), -d.two_point(quad(a, b, u, v)), 1e-14);
    EXPECT_NEAR(d.two_point(quad(u, v, a, b)), d.two_point(quad(a, b, u, v)), 1e-14);
    EXPECT_EQ(d.two_point(quad(a, b, u, u)), 0.0);
    EXPECT_NEAR(d.two_point(quad(a, {1, 0}, a, {1, 0})), 1.0, 1e-12);
    EXPECT_NEAR(d.one_point(a, b2), 0.0, 1e-14);
    EXPECT_GT(d.cache_size(), 0u);
}

// The spectral route obeys the same additivity in its first pair.
TEST(SpectralCorrelator, Additivity) {
    const EigenSystem sys = build_and_codiagonalize(8, ModelParams::from_c(1.0));
    const SpectralMeasure mu = spectral_measure(sys);
    const Face a{0, 0}, b{1, 3}, b2{2, 1}, u{4, 2}, v{6, 7};
    EXPECT_NEAR(cylinder_two_point_spectral(mu, quad(a, b, u, v)) +
                    cylinder_two_point_spectral(mu, quad(b, b2, u, v)),
                cylinder_two_point_spectral(mu, quad(a, b2, u, v)), 1e-10);
}

TEST(TorusDirect, MatchesBruteForce) {
    const int M = 4, L = 4;
    const auto p = ModelParams::from_c(2.0);
    const TorusChain chain(M, L, p);
    DirectCorrelator d = DirectCorrelator::torus(chain, L);
    const PointQuad qs[] = {quad({0, 0}, {1, 0}, {2, 0}, {3, 0}), quad({0, 0}, {1, 1}, {2, 3}, {3, 2}),
                            quad({0, 0}, {0, 2}, {1, 1}, {3, 1})};
    for (const auto& q : qs) {
        const double brute = torus_brute_force(M, L, p, [&](const TorusConfig& cfg) {
            return double(cfg.height_difference(q.points[0], q.points[1]) *
                          cfg.height_difference(q.points[2], q.points[3]));
        });
        EXPECT_NEAR(d.two_point(q), brute, 1e-12);
    }
}

TEST(Gff, Examples) {
    const std::vector<Point2> pts = {{0, 0}, {1, 0}, {3, 0}, {4, 0}};
    const double expect = -(std::log(3.0) + std::log(3.0) - std::log(2.0) - std::log(4.0)) / (2 * kPi);
    EXPECT_NEAR(gff_k_point(pts, 1.0), expect, 1e-15);
    EXPECT_NEAR(gff_k_point(pts, 2.0), 2.0 * expect, 1e-15);
    EXPECT_EQ(gff_k_point({{0, 0}, {1, 0}}, 1.0), 0.0);
    EXPECT_EQ(gff_k_point({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {5, 0}, {6, 0}}, 1.0), 0.0);
    EXPECT_NEAR(gff_k_point({{0, 0}, {0, 0}, {3, 0}, {4, 0}}, 1.0), 0.0, 1e-15);
    EXPECT_THROW(gff_k_point({{0, 0}, {1, 0}, {1, 0}, {4, 0}}, 1.0), std::invalid_argument);
    // Four pairs: three pairings each.
    const std::vector<Point2> eight = {{0, 0}, {1, 0}, {5, 0}, {6, 1}, {0, 9}, {1, 8}, {7, 7}, {6, 9}};
    double brute = 0.0;
    const int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
    for (int mask = 0; mask < 16; ++mask) {
        Point2 ch[4];
        int unprimed = 0;
        for (int i = 0; i < 4; ++i) {
            ch[i] = eight[2 * i + ((mask >> i) & 1)];
            unprimed += !((mask >> i) & 1);
        }
        for (const auto& pr : pairings)
            brute += (unprimed % 2 ? -1 : 1) * green_function(ch[pr[0]], ch[pr[1]]) * green_function(ch[pr[2]], ch[pr[3]]);
    }
    EXPECT_NEAR(gff_k_point(eight, 1.5), 1.5 * 1.5 * brute, 1e-14);
}

TEST(Sigma, ClosedForms) {
    EXPECT_NEAR(sigma_squared(ModelParams::from_c(2.0)).value, 2 / kPi, 1e-15);
    EXPECT_NEAR(sigma_squared(ModelParams::from_c(std::sqrt(3.0))).value, 3 / kPi, 1e-14);
    EXPECT_NEAR(sigma_squared(ModelParams::from_c(std::sqrt(2.0))).value, 4 / kPi, 1e-14);
    for (int i = 0; i < 100; ++i) {
        const double c = 1.0 + i / 99.0;
        const auto s = sigma_squared(ModelParams::from_c(c));
        EXPECT_NEAR(s.via_arccos, s.via_arcsin, 1e-14) << c;
    }
    EXPECT_THROW(sigma_squared(ModelParams::from_c(2.5)), std::invalid_argument);
}

TEST(ScaleSeparation, Examples) {
    const auto s = scale_separation({0, 0}, {1, 0}, {10, 0}, {11, 0});
    EXPECT_NEAR(s.S, std::log(9.0), 1e-15);
    EXPECT_EQ(s.S, s.S_prime);
    const auto o = scale_separation({0, 0}, {2, 0}, {2, 0}, {6, 0});
    EXPECT_EQ(o.S, -std::numeric_limits<double>::infinity());
    EXPECT_NEAR(o.S_prime, -std::log(2.0), 1e-15);
    EXPECT_THROW(scale_separation({0, 0}, {0, 0}, {1, 0}, {2, 0}), std::invalid_argument);
}

TEST(Envelope, Branches) {
    const int far = 1 << 30;
    // S = log(far - 1) is about 20.8, below 80: logarithmic branch, -S' < 1.
    const PointQuad q = quad({0, 0}, {1, 0}, {far, 0}, {far + 1, 0});
    EXPECT_NEAR(regularity_envelope(q), kEnvelopeC, 1e-12);
    // Coincident scale: dist 0 gives 1 v (-S').
    const PointQuad near = quad({0, 0}, {4, 0}, {4, 0}, {8, 0});
    EXPECT_NEAR(regularity_envelope(near), kEnvelopeC * std::log(4.0), 1e-12);
    EXPECT_EQ(regularity_envelope(PointQuad{{{0, 0}, {1, 0}}}), 0.0);
}

TEST(Envelope, FarBranch) {
    // The far branch needs S >= 80, beyond the integer lattice range.
    auto env = [](double d) { return regularity_envelope(std::vector<Point2>{{0, 0}, {1, 0}, {d, 0}, {1.001 * d, 0}}); };
    for (double d : {1e36, 1e40, 1e44}) {
        const double S = std::log(d - 1);
        ASSERT_GE(S, 80.0);
        EXPECT_NEAR(env(d), kEnvelopeC * std::exp(-kEnvelopeAlpha * S), 1e-12 * env(d));
    }
    EXPECT_GT(env(1e36), env(1e40));
    EXPECT_GT(env(1e40), env(1e44));
}
