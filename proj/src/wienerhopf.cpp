#include "sixv/wienerhopf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sixv::wh {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

// e(x) = (1/s) exp(-pi x / s) with s = zeta (zeta > 0) or 1 (zeta = 0).
double scale_of(double zeta) { return zeta > 0.0 ? zeta : 1.0; }

std::vector<double> simpson_weights(int n, double h) {
    std::vector<double> w(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) w[i] = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (double& v : w) v *= h / 3.0;
    return w;
}

// sinh(a) / (2 sinh(b) cosh(c)) for b > 0, c >= 0, written to avoid overflow; expo = |a| - b - c
// is passed in closed form to avoid cancellation at large arguments.
double sinh_ratio(double a, double b, double c, double expo) {
    if (a == 0.0) return 0.0;
    const double num = -std::expm1(-2.0 * std::abs(a));
    const double den = -std::expm1(-2.0 * b) * (1.0 + std::exp(-2.0 * c));
    return std::copysign(std::exp(expo) * num / den, a);
}

}  // namespace

WHParams WHParams::from_c(double c) {
    if (!(c >= 1.0 && c <= 2.0)) throw std::invalid_argument("the Wiener-Hopf chain needs c in [1, 2]");
    WHParams p;
    p.zeta = std::max(0.0, kPi - 2.0 * std::asin(c / 2.0));
    return p;
}

int WHParams::intervals() const { return static_cast<int>(std::lround(X / h)); }

void WHParams::validate() const {
    if (!(zeta >= 0.0 && zeta <= 2.0 * kPi / 3.0 + 1e-12)) throw std::invalid_argument("zeta must lie in [0, 2pi/3]");
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    if (!(X >= 20.0)) throw std::invalid_argument("domain cutoff must be at least 20");
    if (!(t_max > 0.0) || !(dt > 0.0) || dt > t_max) throw std::invalid_argument("invalid Fourier grid");
    const int n = intervals();
    if (std::abs(n * h - X) > 1e-9 * X || n % 2 != 0)
        throw std::invalid_argument("X / h must be an even integer");
    if (max_iter < 1 || !(tol > 0.0)) throw std::invalid_argument("invalid iteration controls");
}

cplx log_gamma(cplx z) {
    static constexpr double g = 7.0;
    static constexpr double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                       771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                       -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real()))
        throw std::domain_error("Gamma pole at z = " + std::to_string(z.real()));
    if (z.real() < 0.5) return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
    z -= 1.0;
    cplx x = coef[0];
    for (int i = 1; i < 9; ++i) x += coef[i] / (z + double(i));
    const cplx t = z + g + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx complex_gamma(cplx z) { return std::exp(log_gamma(z)); }

double kernel_hat(double t, double zeta) {
    const double u = std::abs(t);
    if (zeta == 0.0) return std::exp(-u) / (1.0 + std::exp(-u));
    if (u == 0.0) return (kPi - 2.0 * zeta) / (2.0 * (kPi - zeta));
    const double expo = zeta <= kPi / 2 ? -zeta * u : -(kPi - zeta) * u;
    return sinh_ratio((kPi - 2.0 * zeta) * u / 2.0, (kPi - zeta) * u / 2.0, zeta * u / 2.0, expo);
}

double one_minus_kernel_hat(double t, double zeta) {
    const double u = std::abs(t);
    if (zeta == 0.0) return 1.0 / (1.0 + std::exp(-u));
    if (u == 0.0) return kPi / (2.0 * (kPi - zeta));
    return sinh_ratio(kPi * u / 2.0, (kPi - zeta) * u / 2.0, zeta * u / 2.0, 0.0);
}

double driver(double x, double zeta) {
    if (x < 0.0) return 0.0;
    const double s = scale_of(zeta);
    return std::exp(-kPi * x / s) / s;
}

double driver_ratio(double x, double zeta) { return x < 0.0 ? 0.0 : std::exp(-kPi * x / scale_of(zeta)); }

cplx driver_hat(cplx t, double zeta) { return 1.0 / (kPi + I * scale_of(zeta) * t); }

cplx t_zeta(double zeta) { return I * kPi / scale_of(zeta); }

cplx alpha(cplx t, double zeta) {
    if (t.imag() < 0.0) throw std::domain_error("alpha is evaluated on the closed upper half-plane");
    if (zeta == 0.0) {
        const cplx z = -I * t / (2.0 * kPi);
        const cplx zz = z == 0.0 ? cplx(0.0) : z * (std::log(z) - 1.0);
        return std::exp(zz + 0.5 * std::log(2.0 * kPi) - log_gamma(0.5 + z));
    }
    const double q = zeta / kPi, r = 1.0 - q;
    const cplx expo = -I * r * t / 2.0 * std::log(r) - I * q * t / 2.0 * std::log(q);
    return std::exp(expo + log_gamma(1.0 - I * t / 2.0) - log_gamma(1.0 - I * r * t / 2.0) +
                    0.5 * std::log(2.0 * (kPi - zeta)) - log_gamma(0.5 - I * q * t / 2.0));
}

cplx alpha_plus(double t, double zeta) { return alpha(cplx(t, 0.0), zeta); }

cplx jump_solution(cplx t, double zeta) {
    if (t.imag() == 0.0) throw std::domain_error("jump solution is defined off the real axis");
    const cplx a0 = alpha(t_zeta(zeta), zeta);
    if (t.imag() < 0.0) return a0 * driver_hat(t, zeta);
    return (a0 - alpha(t, zeta)) * driver_hat(t, zeta);
}

namespace {

// R(x) = (1/pi) int_0^inf cos(t x) R_hat(t) dt by the trapezoid rule, for x = k h, k = 0..n.
std::vector<double> kernel_samples(const WHParams& p, int n) {
    const int K = static_cast<int>(std::lround(p.t_max / p.dt));
    std::vector<double> rh(K + 1);
    for (int k = 0; k <= K; ++k) rh[k] = kernel_hat(k * p.dt, p.zeta) * (k == 0 || k == K ? 0.5 : 1.0);
    std::vector<double> R(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double theta = p.dt * i * p.h;
        const cplx rot = std::polar(1.0, theta);
        cplx ph = 1.0;
        double s = 0.0;
        for (int k = 0; k <= K; ++k) {
            s += rh[k] * ph.real();
            ph *= rot;
            if (k % 256 == 255) ph = std::polar(1.0, theta * (k + 1));
        }
        R[i] = s * p.dt / kPi;
    }
    return R;
}

}  // namespace

WHSolution solve_neumann(const WHParams& p) {
    p.validate();
    const int n = p.intervals();
    const double h = p.h;
    const bool slow_tail = p.zeta == 0.0;
    // At zeta = 0 the solution has x^-2 tails; the mass beyond X is modelled as (A + B/y)/y^2,
    // fitted at each iteration from x^2 T(x) at x = X/2 and x = X.
    const int far = slow_tail ? 4 * n : 2 * n;
    const std::vector<double> Rpos = kernel_samples(p, far);
    auto R = [&](int d) { return Rpos[static_cast<std::size_t>(std::abs(d))]; };
    const std::vector<double> w = simpson_weights(n, h);

    // Q_a(x_i) = int_X^{far} R(x_i - y) y^{-a} dy, a = 2, 3, by Simpson on the same grid.
    std::vector<double> Q2(n + 1, 0.0), Q3(n + 1, 0.0), Q2neg(n + 1, 0.0), Q3neg(n + 1, 0.0);
    if (slow_tail) {
        const int m = far - n;  // even
        const std::vector<double> wt = simpson_weights(m, h);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= m; ++j) {
                const double y = (n + j) * h;
                Q2[i] += wt[j] * R(i - n - j) / (y * y);
                Q3[i] += wt[j] * R(i - n - j) / (y * y * y);
                Q2neg[i] += wt[j] * R(-i - n - j) / (y * y);
                Q3neg[i] += wt[j] * R(-i - n - j) / (y * y * y);
            }
    }
    double tailA = 0.0, tailB = 0.0;
    auto fit_tail = [&](const std::vector<double>& v) {
        const double x1 = p.X / 2, x2 = p.X;
        const double a1 = v[n / 2] * x1 * x1, a2 = v[n] * x2 * x2;
        // a(x) = A + B/x through both points.
        tailB = (a1 - a2) / (1.0 / x1 - 1.0 / x2);
        tailA = a2 - tailB / x2;
    };

    std::vector<double> e(n + 1), T(n + 1), next(n + 1), wT(n + 1);
    for (int i = 0; i <= n; ++i) e[i] = driver(i * h, p.zeta);
    T = e;
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out, int i0, int i1, int sign) {
        for (int j = 0; j <= n; ++j) wT[j] = w[j] * in[j];
        for (int i = i0; i <= i1; ++i) {
            double s = 0.0;
            for (int j = 0; j <= n; ++j) s += R(sign * i - j) * wT[j];
            if (slow_tail)
                s += sign > 0 ? tailA * Q2[i] + tailB * Q3[i] : tailA * Q2neg[i] + tailB * Q3neg[i];
            out[i] = s;
        }
    };

    WHSolution sol;
    sol.params = p;
    double change = 0.0;
    int it = 0;
    for (; it < p.max_iter; ++it) {
        if (slow_tail) fit_tail(T);
        apply(T, next, 0, n, 1);
        change = 0.0;
        for (int i = 0; i <= n; ++i) {
            next[i] += e[i];
            change = std::max(change, std::abs(next[i] - T[i]));
        }
        T.swap(next);
        if (change < p.tol) break;
    }
    if (change >= p.tol)
        throw std::runtime_error("Neumann iteration did not converge in " + std::to_string(p.max_iter) + " steps");
    sol.iterations = it + 1;

    apply(T, next, 0, n, 1);
    for (int i = 0; i <= n; ++i) sol.residual = std::max(sol.residual, std::abs(T[i] - next[i] - e[i]));

    std::vector<double> neg(n + 1, 0.0);
    apply(T, neg, 1, n, -1);

    sol.x.resize(2 * n + 1);
    sol.R.resize(2 * n + 1);
    sol.e.resize(2 * n + 1);
    sol.T.resize(2 * n + 1);
    for (int k = -n; k <= n; ++k) {
        const auto idx = static_cast<std::size_t>(k + n);
        sol.x[idx] = k * h;
        sol.R[idx] = R(k);
        sol.e[idx] = k >= 0 ? e[k] : 0.0;
        sol.T[idx] = k >= 0 ? T[k] : neg[-k];
    }

    const std::vector<double> w2 = simpson_weights(2 * n, h);
    for (int k = 0; k <= 2 * n; ++k) {
        sol.kernel_integral += w2[k] * sol.R[k];
        sol.kernel_l1 += w2[k] * std::abs(sol.R[k]);
    }

    double I1 = 0.0, I2 = 0.0, total = 0.0, tail = 0.0;
    for (int i = 0; i <= n; ++i) {
        I1 += w[i] * T[i];
        I2 += w[i] * driver_ratio(i * h, p.zeta) * T[i];
        const double tw = (i == 0 || i == n) ? h / 2 : h;
        total += tw * std::abs(T[i]);
        if (2 * i >= n) tail += tw * std::abs(T[i]);
    }
    sol.tail_fraction = total > 0.0 ? tail / total : 0.0;
    if (slow_tail) {
        sol.tail_correction = tailA / p.X + tailB / (2.0 * p.X * p.X);
        I1 += sol.tail_correction;
    }
    sol.I1 = I1;
    sol.I2 = I2;
    return sol;
}

ClosedFormSolution T_closed_form(const WHParams& p, bool with_grid) {
    p.validate();
    ClosedFormSolution cf;
    const cplx atz = alpha(t_zeta(p.zeta), p.zeta);
    if (std::abs(atz.imag()) > 1e-12 * std::abs(atz)) throw std::runtime_error("alpha(t_zeta) is not real");
    cf.alpha_tz = atz.real();
    const double a0 = alpha_plus(0.0, p.zeta).real();
    cf.I1 = a0 * cf.alpha_tz / kPi;
    cf.I2 = cf.alpha_tz * cf.alpha_tz / (2.0 * kPi);

    // T_up_hat = alpha(t_zeta) e_hat + rho with rho = alpha(t_zeta) (alpha_+(-t) - 1) e_hat, decaying like 1/t^2.
    const int K = static_cast<int>(std::lround(p.t_max / p.dt));
    std::vector<cplx> rho(K + 1);
    for (int k = 0; k <= K; ++k) {
        const double t = k * p.dt;
        rho[k] = cf.alpha_tz * (alpha_plus(-t, p.zeta) - 1.0) * driver_hat(t, p.zeta) * (k == 0 || k == K ? 0.5 : 1.0);
    }
    const double s = scale_of(p.zeta);
    cplx acc = 0.0;
    for (int k = 0; k <= K; ++k) acc += driver_hat(-k * p.dt, p.zeta) * rho[k];
    cf.I2_plancherel = cf.alpha_tz / (2.0 * kPi) + s / kPi * (acc * p.dt).real();

    if (with_grid) {
        const int n = p.intervals();
        cf.x.resize(n + 1);
        cf.T.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double x = i * p.h;
            const double theta = p.dt * x;
            const cplx rot = std::polar(1.0, theta);
            cplx ph = 1.0, sum = 0.0;
            for (int k = 0; k <= K; ++k) {
                sum += ph * rho[k];
                ph *= rot;
                if (k % 256 == 255) ph = std::polar(1.0, theta * (k + 1));
            }
            cf.x[i] = x;
            cf.T[i] = cf.alpha_tz * driver(x, p.zeta) + (sum * p.dt).real() / kPi;
        }
    }
    return cf;
}

double ratio_target(double zeta) { return kPi * kPi / (4.0 * (kPi - zeta)); }

double f_from_integrals(double I1, double I2, double zeta) {
    const double d = kPi / (kPi - zeta) * I1;
    return -2.0 * I2 / (d * d);
}

double f_second_derivative(const WHParams& p, FMethod method) {
    switch (method) {
        case FMethod::closed:
            p.validate();
            return -(kPi - p.zeta) / 2.0;
        case FMethod::neumann: {
            const WHSolution s = solve_neumann(p);
            return f_from_integrals(s.I1, s.I2, p.zeta);
        }
        case FMethod::rh: {
            const ClosedFormSolution cf = T_closed_form(p, false);
            return f_from_integrals(cf.I1, cf.I2_plancherel, p.zeta);
        }
    }
    throw std::invalid_argument("unknown method");
}

FComparison f_second_derivative_all(const WHParams& p) {
    FComparison c;
    c.closed = f_second_derivative(p, FMethod::closed);
    c.neumann = f_second_derivative(p, FMethod::neumann);
    c.rh = f_second_derivative(p, FMethod::rh);
    const double v[3] = {c.closed, c.neumann, c.rh};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            c.max_rel_dev = std::max(c.max_rel_dev, std::abs(v[i] - v[j]) / std::abs(c.closed));
    if (c.max_rel_dev > 1e-2)
        throw std::runtime_error("f'' methods disagree by " + std::to_string(c.max_rel_dev) + " relative");
    return c;
}

std::vector<ConvergenceRow> convergence_study(double zeta, const std::vector<double>& hs,
                                              const std::vector<double>& Xs) {
    std::vector<ConvergenceRow> rows;
    for (double X : Xs)
        for (double h : hs) {
            WHParams p;
            p.zeta = zeta;
            p.h = h;
            p.X = X;
            const WHSolution s = solve_neumann(p);
            rows.push_back({h, X, s.ratio(), std::abs(s.ratio() / ratio_target(zeta) - 1.0)});
        }
    return rows;
}

}  // namespace sixv::wh
