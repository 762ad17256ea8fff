#ifndef CERTKIT_GREEN_BVP_HPP
#define CERTKIT_GREEN_BVP_HPP

#include "certkit/gridfn.hpp"

#include <Eigen/Dense>
#include <string>

namespace certkit {

/**
 * The coupling-weight boundary value problem
 *
 *   a^2 P12''(z) + C^T P12(z) = -B(z) - P D(z),   P12(0) = P12(l) = 0,
 *
 * posed by the Lyapunov construction for the ODE-PDE cascade.
 */
struct CouplingProblem {
    double a;
    Eigen::MatrixXd C; // n x n, arbitrary real
    Eigen::MatrixXd P; // n x n, symmetric positive definite
    SampledFn B;       // n components
    SampledFn D;       // n components

    CouplingProblem(double a, Eigen::MatrixXd C, Eigen::MatrixXd P, SampledFn B, SampledFn D);

    int dim() const { return static_cast<int>(C.rows()); }
    double l() const { return B.grid().l; }
    const Grid& grid() const { return B.grid(); }

    /** Normalized forcing F(z) = -(B(z) + P D(z)) / a^2. */
    SampledFn forcing() const;
};

enum class KernelRegime { ScalarClosedForm, SymmetricPdMatrix };

/**
 * Green's function of P'' + C^T P / a^2 = F with zero Dirichlet data, for
 * symmetric positive definite C (and its n = 1 closed form). Built from the
 * eigendecomposition of C with a scalar kernel per eigenvalue.
 */
class GreenKernel {
  public:
    GreenKernel(double a, double l, Eigen::VectorXd eigenvalues, Eigen::MatrixXd rotation,
                KernelRegime regime);

    /** Kernel value G(z,xi), n x n. */
    Eigen::MatrixXd operator()(double z, double xi) const;

    /** Analytic branch valid for xi <= z, evaluable for all xi (used by split quadrature). */
    Eigen::MatrixXd lower_branch(double z, double xi) const;
    /** Analytic branch valid for xi >= z. */
    Eigen::MatrixXd upper_branch(double z, double xi) const;

    KernelRegime regime() const { return regime_; }
    int dim() const { return static_cast<int>(eigenvalues_.size()); }
    double a() const { return a_; }
    double l() const { return l_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& rotation() const { return rotation_; }

  private:
    double a_, l_;
    Eigen::VectorXd eigenvalues_; // eigenvalues of C, all > 0
    Eigen::MatrixXd rotation_;    // orthogonal Q with C = Q diag Q^T
    KernelRegime regime_;
};

GreenKernel green_kernel_scalar(double c, double a, double l);
GreenKernel green_kernel_sym(const Eigen::MatrixXd& C, double a, double l);

enum class SolveMethod { Green, Direct };

/** Sampled coupling weight with its norms and the finite-difference residual. */
struct P12Solution {
    SampledFn values;
    double norm_l1;
    double norm_l2;
    double norm_linf;
    double residual_norm;
    SolveMethod method;
};

/** Solve via quadrature of the Green's function (scalar or symmetric PD C). */
P12Solution solve_p12_green(const CouplingProblem& problem);

/**
 * Solve via the first-order companion system Y' = A Y + (0,F) propagated by
 * interval matrix exponentials; valid for arbitrary real C.
 */
P12Solution solve_p12_direct(const CouplingProblem& problem);

/** Max over interior nodes of || a^2 D2 P12 + C^T P12 + B + P D || (centered differences). */
double p12_residual(const P12Solution& solution, const CouplingProblem& problem);

/**
 * Integral rows I(z_i) = integral of G(z_i,xi) w(xi) dxi for a sampled weight w,
 * with the quadrature split at the kernel's diagonal kink. Order-4 accurate.
 */
Eigen::MatrixXd integral_against_kernel(const GreenKernel& kernel, const SampledFn& w);

} // namespace certkit

#endif
