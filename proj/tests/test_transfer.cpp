#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sixv/transfer.hpp"

using namespace sixv;

namespace {

// Reference: enumerate every vertical assignment and test the ice rule vertex by vertex.
double brute_line(Mask from, Mask to, int L, Mask monomial, double c) {
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
        double prod = 1.0;
        for (int j = 0; j < L; ++j)
            if ((monomial >> j) & 1u) prod *= (a >> j) & 1u ? 1.0 : -1.0;
        sum += prod * std::pow(c, cv);
    }
    return sum;
}

const double kCs[] = {1.0, std::numbers::sqrt2, std::sqrt(3.0), 2.0};

}  // namespace

TEST(TransferEntry, Examples) {
    const double c = 1.7;
    const auto p = ModelParams::from_c(c);
    EXPECT_DOUBLE_EQ(transfer_entry({0b01, 2}, {0b01, 2}, p), 2.0);
    EXPECT_DOUBLE_EQ(transfer_entry({0b01, 2}, {0b10, 2}, p), c * c);
    EXPECT_DOUBLE_EQ(transfer_entry({0b0011, 4}, {0b1100, 4}, p), 0.0);
    EXPECT_DOUBLE_EQ(brute_line(0b01, 0b10, 2, 0, c), c * c);
    EXPECT_DOUBLE_EQ(brute_line(0b0011, 0b1100, 4, 0, c), 0.0);
}

TEST(VerticalEntry, Examples) {
    const double c = 1.3;
    const auto p = ModelParams::from_c(c);
    EXPECT_DOUBLE_EQ(vertical_entry({0b01, 2}, {0b01, 2}, 0, p), 0.0);
    EXPECT_DOUBLE_EQ(vertical_entry({0b01, 2}, {0b10, 2}, 0, p), c * c);
    EXPECT_DOUBLE_EQ(vertical_entry({0b10, 2}, {0b01, 2}, 0, p), -c * c);
    EXPECT_THROW(vertical_entry({0b01, 2}, {0b10, 2}, 2, p), std::out_of_range);
    EXPECT_THROW(transfer_entry({0b01, 2}, {0b0011, 4}, p), std::invalid_argument);
}

TEST(TransferEntry, MatchesBruteForceOnAllPairs) {
    for (int L : {2, 4, 6}) {
        const BasisIndex b = enumerate_balanced(L);
        for (Mask x : b.configs())
            for (Mask y : b.configs()) {
                EXPECT_EQ(valid_verticals({x, L}, {y, L}).size() == 2, x == y);
                for (Mask mono : {Mask{0}, Mask{1}, Mask{0b101} & low_mask(L), low_mask(L)})
                    EXPECT_NEAR(line_entry(x, y, L, mono, 1.9), brute_line(x, y, L, mono, 1.9), 1e-12);
            }
    }
}

TEST(FlipTransitions, AgreeWithDenseEnumeration) {
    for (int L : {4, 6, 8}) {
        const BasisIndex b = enumerate_balanced(L);
        for (Mask x : b.configs()) {
            std::size_t nonzero = 0;
            for (Mask y : b.configs())
                if (y != x && !valid_verticals({x, L}, {y, L}).empty()) ++nonzero;
            const auto tr = flip_transitions(x, L);
            EXPECT_EQ(tr.size(), nonzero);
            for (const auto& t : tr) {
                const auto v = valid_verticals({x, L}, {t.target, L});
                ASSERT_EQ(v.size(), 1u);
                EXPECT_EQ(v[0], t.alpha);
                EXPECT_EQ(t.flips, std::popcount(x ^ t.target));
            }
        }
    }
}

TEST(DenseOperators, SymmetryAntisymmetryCommutation) {
    for (int L : {2, 4, 6, 8}) {
        const BasisIndex b = enumerate_balanced(L);
        for (double c : kCs) {
            const auto p = ModelParams::from_c(c);
            const Eigen::MatrixXd t = dense_transfer(b, p);
            const Eigen::MatrixXd s0 = dense_vertical(b, 0, p);
            const Eigen::MatrixXd T = dense_shift(b);
            EXPECT_EQ((t - t.transpose()).cwiseAbs().maxCoeff(), 0.0);
            EXPECT_EQ((s0 + s0.transpose()).cwiseAbs().maxCoeff(), 0.0);
            EXPECT_GE(t.minCoeff(), 0.0);
            EXPECT_LE((t * T - T * t).cwiseAbs().maxCoeff(), 1e-12 * t.cwiseAbs().maxCoeff());
            Eigen::MatrixXd conj = s0;
            for (int j = 1; j < L; ++j) {
                conj = T * conj * T.transpose();
                EXPECT_LE((conj - dense_vertical(b, j, p)).cwiseAbs().maxCoeff(), 1e-14);
            }
            EXPECT_LE((T * T.transpose() - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 0.0);
        }
    }
}

TEST(EigenSystem, L2ClosedForm) {
    for (double c : kCs) {
        const auto sys = build_and_codiagonalize(2, ModelParams::from_c(c));
        ASSERT_EQ(sys.size(), 2u);
        EXPECT_NEAR(sys.lambda0(), 2.0 + c * c, 1e-13);
        EXPECT_NEAR(sys.Lambda(0), 1.0, 1e-15);
        EXPECT_NEAR(sys.Lambda(1), (2.0 - c * c) / (2.0 + c * c), 1e-13);
        EXPECT_NEAR(std::abs(sys.shift_eigenvalue(0) - 1.0), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(sys.shift_eigenvalue(1) + 1.0), 0.0, 1e-15);
        EXPECT_NEAR(sys.b(1), std::numbers::pi, 1e-15);
    }
}

TEST(EigenSystem, TopEigenvalueMatchesPowerIteration) {
    const BasisIndex b = enumerate_balanced(4);
    const Eigen::MatrixXd t = dense_transfer(b, ModelParams::from_c(std::numbers::sqrt2));
    Eigen::VectorXd x = Eigen::VectorXd::Ones(6);
    double lam = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXd y = t * x;
        lam = y.norm() / x.norm();
        x = y / y.norm();
    }
    const auto sys = build_and_codiagonalize(4, ModelParams::from_c(std::numbers::sqrt2));
    EXPECT_NEAR(sys.lambda0(), lam, 1e-12 * lam);
}

TEST(EigenSystem, InvariantsAgainstDenseOperators) {
    for (int L : {4, 6, 8, 10}) {
        for (double c : kCs) {
            const auto p = ModelParams::from_c(c);
            const auto sys = build_and_codiagonalize(L, p);
            const Eigen::MatrixXd t = dense_transfer(sys.basis(), p);
            const Eigen::MatrixXd T = dense_shift(sys.basis());
            const auto n = static_cast<Eigen::Index>(sys.size());
            ASSERT_EQ(static_cast<std::size_t>(n), sys.basis().size());
            Eigen::MatrixXcd V(n, n);
            for (Eigen::Index k = 0; k < n; ++k) V.col(k) = sys.full_vector(static_cast<std::size_t>(k));

            EXPECT_LE((V.adjoint() * V - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_LE((V * V.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_NEAR(sys.Lambda(0), 1.0, 1e-15);
            EXPECT_GT(sys.v0().minCoeff(), 0.0);
            for (Eigen::Index k = 0; k < n; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const double lam = sys.Lambda(kk);
                const cplx mu = sys.shift_eigenvalue(kk);
                EXPECT_LE((t.cast<cplx>() * V.col(k) / sys.lambda0() - lam * V.col(k)).norm(), 1e-10);
                EXPECT_LE((T.cast<cplx>() * V.col(k) - mu * V.col(k)).norm(), 1e-10);
                EXPECT_NEAR(std::abs(std::pow(mu, L) - 1.0), 0.0, 1e-10);
                if (k > 0) {
                    EXPECT_LT(std::abs(lam), 1.0);
                    EXPECT_GT(lam, -1.0);
                    EXPECT_LE(std::abs(lam), std::abs(sys.Lambda(kk - 1)) + 1e-15);
                }
                const double b = sys.b(kk);
                EXPECT_GT(b, -std::numbers::pi);
                EXPECT_LE(b, std::numbers::pi);
            }
            EXPECT_LE(sys.max_residual(), kEigenResidualTol);
            // Projection agrees with the explicit inner product.
            Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
            EXPECT_LE((sys.project(w) - V.adjoint() * w.cast<cplx>()).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(EigenSystem, CacheRoundTrip) {
    const auto sys = build_and_codiagonalize(8, ModelParams::from_c(std::sqrt(3.0)));
    const auto file = std::filesystem::temp_directory_path() / "sixv_eig_cache_test.bin";
    save_eigensystem(sys, file);
    const auto back = load_eigensystem(file);
    ASSERT_EQ(back.size(), sys.size());
    EXPECT_EQ(back.lambda0(), sys.lambda0());
    for (std::size_t k = 0; k < sys.size(); ++k) {
        EXPECT_EQ(back.Lambda(k), sys.Lambda(k));
        EXPECT_EQ(back.momentum(k), sys.momentum(k));
    }
    EXPECT_EQ((back.v0() - sys.v0()).cwiseAbs().maxCoeff(), 0.0);
    {
        std::ofstream bad(file, std::ios::binary);
        bad << "not a cache";
    }
    EXPECT_THROW(load_eigensystem(file), std::runtime_error);
    std::filesystem::remove(file);
}

TEST(EigenSystem, LargerSizesBuild) {
    const auto sys = build_and_codiagonalize(14, ModelParams::from_c(std::sqrt(3.0)));
    EXPECT_EQ(sys.size(), 3432u);
    EXPECT_LE(sys.max_residual(), kEigenResidualTol);
    EXPECT_LT(sys.Lambda(1), 1.0);
}
