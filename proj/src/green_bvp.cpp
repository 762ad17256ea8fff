#include "certkit/green_bvp.hpp"

#include "certkit/errors.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace certkit {

namespace {

constexpr double kScalarResonanceTol = 1e-12; // on |sin(lambda l)|
constexpr double kDetResonanceTol = 1e-10;    // on |det sin((1/a) C^(1/2) l)|
constexpr double kBoundaryCondTol = 1e12;     // condition number of the boundary solve

void check_symmetric_pd(const Eigen::MatrixXd& M, const std::string& what) {
    const double scale = 1.0 + M.cwiseAbs().maxCoeff();
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw domain_error(what + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw domain_error(what + " must be positive definite");
}

} // namespace

CouplingProblem::CouplingProblem(double a_in, Eigen::MatrixXd C_in, Eigen::MatrixXd P_in,
                                 SampledFn B_in, SampledFn D_in)
    : a(a_in), C(std::move(C_in)), P(std::move(P_in)), B(std::move(B_in)), D(std::move(D_in)) {
    if (!(a > 0.0))
        throw domain_error("coupling problem: diffusion coefficient a must be positive");
    if (C.rows() != C.cols() || P.rows() != P.cols() || C.rows() != P.rows())
        throw domain_error("coupling problem: C and P must be square matrices of equal size");
    check_symmetric_pd(P, "coupling problem: P");
    if (!(B.grid() == D.grid()))
        throw domain_error("coupling problem: B and D must share one grid");
    if (B.components() != dim() || D.components() != dim())
        throw domain_error("coupling problem: B and D must have n components");
}

SampledFn CouplingProblem::forcing() const {
    Eigen::MatrixXd f = -(B.values() + D.values() * P.transpose()) / (a * a);
    return SampledFn(B.grid(), std::move(f));
}

GreenKernel::GreenKernel(double a, double l, Eigen::VectorXd eigenvalues,
                         Eigen::MatrixXd rotation, KernelRegime regime)
    : a_(a), l_(l), eigenvalues_(std::move(eigenvalues)), rotation_(std::move(rotation)),
      regime_(regime) {}

Eigen::MatrixXd GreenKernel::lower_branch(double z, double xi) const {
    const int n = dim();
    Eigen::VectorXd diag(n);
    for (int k = 0; k < n; ++k) {
        const double c = eigenvalues_(k);
        const double nu = std::sqrt(c) / a_;
        diag(k) = a_ * std::sin(nu * xi) * std::sin(nu * (z - l_)) /
                  (std::sqrt(c) * std::sin(nu * l_));
    }
    return rotation_ * diag.asDiagonal() * rotation_.transpose();
}

Eigen::MatrixXd GreenKernel::upper_branch(double z, double xi) const {
    return lower_branch(xi, z);
}

Eigen::MatrixXd GreenKernel::operator()(double z, double xi) const {
    return (xi <= z) ? lower_branch(z, xi) : upper_branch(z, xi);
}

GreenKernel green_kernel_scalar(double c, double a, double l) {
    if (!(c > 0.0) || !(a > 0.0) || !(l > 0.0))
        throw domain_error("scalar kernel: c, a, l must be positive");
    const double nu = std::sqrt(c) / a;
    if (std::abs(std::sin(nu * l)) <= kScalarResonanceTol)
        throw singular_problem_error("scalar kernel: sin(lambda l) vanishes at lambda l = " +
                                     std::to_string(nu * l) + " (resonant interval length)");
    Eigen::VectorXd ev(1);
    ev(0) = c;
    return GreenKernel(a, l, ev, Eigen::MatrixXd::Identity(1, 1),
                       KernelRegime::ScalarClosedForm);
}

GreenKernel green_kernel_sym(const Eigen::MatrixXd& C, double a, double l) {
    if (C.rows() != C.cols())
        throw domain_error("matrix kernel: C must be square");
    const double scale = 1.0 + C.cwiseAbs().maxCoeff();
    if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw unsupported_regime_error(
            "matrix kernel: C is not symmetric; use solve_p12_direct instead");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw unsupported_regime_error(
            "matrix kernel: C is not positive definite; use solve_p12_direct instead");
    double det_sin = 1.0;
    int worst = 0;
    double worst_abs = std::numeric_limits<double>::infinity();
    for (int k = 0; k < C.rows(); ++k) {
        const double s = std::sin(std::sqrt(es.eigenvalues()(k)) * l / a);
        det_sin *= s;
        if (std::abs(s) < worst_abs) {
            worst_abs = std::abs(s);
            worst = k;
        }
    }
    if (std::abs(det_sin) <= kDetResonanceTol)
        throw singular_problem_error(
            "matrix kernel: det sin((1/a) C^{1/2} l) = " + std::to_string(det_sin) +
            " is resonant; offending eigenvalue " + std::to_string(es.eigenvalues()(worst)));
    const KernelRegime regime =
        (C.rows() == 1) ? KernelRegime::ScalarClosedForm : KernelRegime::SymmetricPdMatrix;
    return GreenKernel(a, l, es.eigenvalues(), es.eigenvectors(), regime);
}

Eigen::MatrixXd integral_against_kernel(const GreenKernel& kernel, const SampledFn& w) {
    const Grid& grid = w.grid();
    const int m = grid.m;
    const int n = kernel.dim();
    if (w.components() != n)
        throw domain_error("kernel quadrature: component count mismatch");
    const double h = grid.h();
    const Eigen::MatrixXd& Q = kernel.rotation();

    // Rotate into the eigenbasis: each channel k is a decoupled scalar kernel
    //   g_k(z,xi) = a sin(nu_k min) sin(nu_k (max - l)) / (sqrt(c_k) sin(nu_k l)).
    // The branch factorizes, so prefix/suffix integrals of sin(nu xi) w_k(xi)
    // and sin(nu (xi - l)) w_k(xi) give order-4 accuracy across the kink.
    Eigen::MatrixXd wq = w.values() * Q; // m x n, channel samples
    Eigen::MatrixXd result(m, n);
    std::vector<double> lo(m), hi(m);
    for (int k = 0; k < n; ++k) {
        const double c = kernel.eigenvalues()(k);
        const double nu = std::sqrt(c) / kernel.a();
        const double denom = std::sqrt(c) * std::sin(nu * kernel.l());
        for (int i = 0; i < m; ++i) {
            const double z = grid.node(i);
            lo[i] = std::sin(nu * z) * wq(i, k);
            hi[i] = std::sin(nu * (z - kernel.l())) * wq(i, k);
        }
        const double hi_total = simpson(hi, h);
        for (int i = 0; i < m; ++i) {
            const double z = grid.node(i);
            const double pre = integrate_prefix(lo, h, i);
            const double suf = hi_total - integrate_prefix(hi, h, i);
            result(i, k) =
                kernel.a() * (std::sin(nu * (z - kernel.l())) * pre + std::sin(nu * z) * suf) /
                denom;
        }
    }
    return result * Q.transpose();
}

namespace {

P12Solution finish_solution(SampledFn values, const CouplingProblem& problem,
                            SolveMethod method) {
    values.values().row(0).setZero();
    values.values().row(values.grid().m - 1).setZero();
    P12Solution sol{std::move(values), 0.0, 0.0, 0.0, 0.0, method};
    sol.norm_l1 = lp_norm(sol.values, 1.0);
    sol.norm_l2 = lp_norm(sol.values, 2.0);
    sol.norm_linf = lp_norm(sol.values, inf_norm_order);
    sol.residual_norm = p12_residual(sol, problem);
    return sol;
}

} // namespace

P12Solution solve_p12_green(const CouplingProblem& problem) {
    GreenKernel kernel = (problem.dim() == 1 && problem.C(0, 0) > 0.0)
                             ? green_kernel_scalar(problem.C(0, 0), problem.a, problem.l())
                             : green_kernel_sym(problem.C, problem.a, problem.l());
    Eigen::MatrixXd p12 = integral_against_kernel(kernel, problem.forcing());
    return finish_solution(SampledFn(problem.grid(), std::move(p12)), problem,
                           SolveMethod::Green);
}

P12Solution solve_p12_direct(const CouplingProblem& problem) {
    const Grid& grid = problem.grid();
    const int m = grid.m;
    const int n = problem.dim();
    const double h = grid.h();
    const SampledFn F = problem.forcing();
    const Eigen::MatrixXd& Fv = F.values();

    // Companion system Y' = A Y + (0, F), A = [[0, I], [-C^T/a^2, 0]].
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    A.topRightCorner(n, n).setIdentity();
    A.bottomLeftCorner(n, n) = -problem.C.transpose() / (problem.a * problem.a);
    const Eigen::MatrixXd E = (A * h).exp();
    const Eigen::MatrixXd Eh = (A * (h / 2.0)).exp();

    // Cubic interpolation of F at interval midpoints for the Duhamel Simpson rule.
    auto f_mid = [&](int j) -> Eigen::VectorXd {
        if (m < 4)
            return 0.5 * (Fv.row(j) + Fv.row(j + 1)).transpose();
        if (j == 0)
            return ((5.0 * Fv.row(0) + 15.0 * Fv.row(1) - 5.0 * Fv.row(2) + Fv.row(3)) / 16.0)
                .transpose();
        if (j == m - 2)
            return ((Fv.row(m - 4) - 5.0 * Fv.row(m - 3) + 15.0 * Fv.row(m - 2) +
                     5.0 * Fv.row(m - 1)) /
                    16.0)
                .transpose();
        return ((-Fv.row(j - 1) + 9.0 * Fv.row(j) + 9.0 * Fv.row(j + 1) - Fv.row(j + 2)) / 16.0)
            .transpose();
    };
    auto lift_forcing = [n](const Eigen::VectorXd& f) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * f.size());
        g.tail(f.size()) = f;
        return g;
    };
    auto duhamel = [&](int j) -> Eigen::VectorXd {
        return (h / 6.0) * (E * lift_forcing(Fv.row(j).transpose()) +
                            4.0 * (Eh * lift_forcing(f_mid(j))) +
                            lift_forcing(Fv.row(j + 1).transpose()));
    };

    // Particular solution from zero initial data.
    Eigen::VectorXd yp = Eigen::VectorXd::Zero(2 * n);
    for (int j = 0; j < m - 1; ++j)
        yp = E * yp + duhamel(j);

    // Unknown initial slope s from P12(l) = 0: Phi_12 s = -yp_upper(l).
    Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int j = 0; j < m - 1; ++j)
        Phi = E * Phi;
    const Eigen::MatrixXd M = Phi.topRightCorner(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    // conditioning of the boundary solve relative to the propagator scale; at a
    // resonance the slope-to-endpoint block collapses while Phi stays O(1)
    const double scale = std::max({svd.singularValues().maxCoeff(),
                                   Phi.cwiseAbs().maxCoeff(), 1.0});
    if (smin <= 0.0 || scale / smin > kBoundaryCondTol)
        throw singular_problem_error(
            "direct solver: boundary solve is ill-conditioned (resonant problem), cond = " +
            std::to_string(smin > 0.0 ? scale / smin : std::numeric_limits<double>::infinity()));
    const Eigen::VectorXd slope = svd.solve(-yp.head(n));

    Eigen::MatrixXd p12(m, n);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
    y.tail(n) = slope;
    p12.row(0) = y.head(n).transpose();
    for (int j = 0; j < m - 1; ++j) {
        y = E * y + duhamel(j);
        p12.row(j + 1) = y.head(n).transpose();
    }
    return finish_solution(SampledFn(grid, std::move(p12)), problem, SolveMethod::Direct);
}

double p12_residual(const P12Solution& solution, const CouplingProblem& problem) {
    if (!(solution.values.grid() == problem.grid()))
        throw domain_error("residual: solution grid does not match problem grid");
    const Eigen::MatrixXd& Pv = solution.values.values();
    const double h = problem.grid().h();
    const double a2 = problem.a * problem.a;
    const Eigen::MatrixXd Ct = problem.C.transpose();
    double worst = 0.0;
    for (int i = 1; i + 1 < problem.grid().m; ++i) {
        const Eigen::VectorXd d2 =
            (Pv.row(i - 1) - 2.0 * Pv.row(i) + Pv.row(i + 1)).transpose() / (h * h);
        const Eigen::VectorXd r = a2 * d2 + Ct * Pv.row(i).transpose() +
                                  problem.B.at(i) + problem.P * problem.D.at(i);
        worst = std::max(worst, r.norm());
    }
    return worst;
}

} // namespace certkit
