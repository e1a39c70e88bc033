#pragma once

#include <complex>
#include <vector>

namespace sixv::wh {

using cplx = std::complex<double>;

// Half-line integral equation T(x) - int_0^inf R(x-y) T(y) dy = e(x) with anisotropy zeta in [0, 2pi/3].
struct WHParams {
    double zeta = 0.0;
    double h = 0.01;        // real-space grid spacing
    double X = 40.0;        // real-space cutoff
    double t_max = 200.0;   // Fourier cutoff
    double dt = 0.01;       // Fourier quadrature step
    int max_iter = 200;
    double tol = 1e-12;     // sup-norm change at which the iteration stops

    // zeta = arccos(-Delta) = pi - 2 arcsin(c/2).
    static WHParams from_c(double c);
    void validate() const;
    int intervals() const;  // number of grid intervals on [0, X]; even
};

// Lanczos approximation (g = 7, 9 terms) with reflection for Re z < 1/2.
cplx log_gamma(cplx z);
cplx complex_gamma(cplx z);

double kernel_hat(double t, double zeta);
double one_minus_kernel_hat(double t, double zeta);
double driver(double x, double zeta);          // e(x)
double driver_ratio(double x, double zeta);    // e(x) / e(0)
cplx driver_hat(cplx t, double zeta);

// Factor of 1 - R_hat, holomorphic in the upper half-plane; real t is the boundary value.
cplx alpha(cplx t, double zeta);
cplx alpha_plus(double t, double zeta);
cplx t_zeta(double zeta);  // pole of e_hat in the upper half-plane
// Solution of the scalar jump problem G_- - G_+ = alpha_+ e_hat; evaluated off the real axis.
cplx jump_solution(cplx t, double zeta);

struct WHSolution {
    WHParams params;
    std::vector<double> x;   // grid on [-X, X]
    std::vector<double> R;
    std::vector<double> e;
    std::vector<double> T;
    double I1 = 0.0;         // int_0^inf T, tail-corrected at zeta = 0
    double I2 = 0.0;         // int_0^inf (e/e(0)) T
    double residual = 0.0;   // sup over the grid of |T - R*(1_{>=0} T) - e|
    double kernel_l1 = 0.0;  // int |R| on the grid
    double kernel_integral = 0.0;
    double tail_fraction = 0.0;   // int_{X/2}^X |T| / int_0^X |T|
    double tail_correction = 0.0; // analytic mass beyond X added to I1
    int iterations = 0;

    double ratio() const { return I2 / (I1 * I1); }
};

WHSolution solve_neumann(const WHParams& p);

struct ClosedFormSolution {
    std::vector<double> x;   // grid on [0, X]
    std::vector<double> T;
    double alpha_tz = 0.0;   // alpha(t_zeta), real
    double I1 = 0.0;         // alpha_+(0) alpha(t_zeta) / pi
    double I2 = 0.0;         // alpha(t_zeta)^2 / (2 pi)
    double I2_plancherel = 0.0;  // frequency-space quadrature of int (e/e(0)) T

    double ratio() const { return I2 / (I1 * I1); }
};

ClosedFormSolution T_closed_form(const WHParams& p, bool with_grid = true);

double ratio_target(double zeta);  // pi^2 / (4 (pi - zeta))
double f_from_integrals(double I1, double I2, double zeta);

enum class FMethod { closed, neumann, rh };
double f_second_derivative(const WHParams& p, FMethod method);

struct FComparison {
    double closed = 0.0;
    double neumann = 0.0;
    double rh = 0.0;
    double max_rel_dev = 0.0;
};
// Runs all three methods; throws if any pair disagrees by more than 1e-2 relative.
FComparison f_second_derivative_all(const WHParams& p);

struct ConvergenceRow {
    double h;
    double X;
    double ratio;
    double ratio_error;
};
std::vector<ConvergenceRow> convergence_study(double zeta, const std::vector<double>& hs, const std::vector<double>& Xs);

}  // namespace sixv::wh
