#ifndef CERTKIT_GALERKIN_SIM_HPP
#define CERTKIT_GALERKIN_SIM_HPP

#include "certkit/certificate.hpp"
#include "certkit/functions.hpp"
#include "certkit/green_bvp.hpp"
#include "certkit/gridfn.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace certkit {

/** Orthonormal sine basis e_j(z) = sqrt(2/l) sin(pi j z / l), j = 1..N, with
 *  the diffusion eigenvalues mu_j = -a^2 (pi j / l)^2. */
struct SineBasis {
    int N;
    double l;
    double a;
    Eigen::VectorXd mu;

    SineBasis(int N, double l, double a);
    double eval(int j, double z) const; // j in 1..N
};

/** Dirichlet boundary signals d1, d2 with d_i(0) = 0 and a sup bound d_inf. */
struct Disturbance {
    ScalarFn d1;
    ScalarFn d2;
    double d_inf = 0.0;

    static Disturbance none();
    /** Checks d_i(0) = 0 and |d_i(t)| <= d_inf on a sample sweep of [0,T]. */
    void check(double T) const;
};

struct SpectralState {
    Eigen::VectorXd uhat; // N coefficients of the lifted PDE state
    Eigen::VectorXd x;    // ODE state
    double t = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> u_l2;
    std::vector<double> x_norm;
    std::vector<double> V; // empty when no coupling weight was supplied
    std::vector<std::pair<double, Eigen::VectorXd>> snapshots;
    double sup_abs = 0.0; // sup over grid and recorded times of |field|
};

enum class Scheme { Etdrk2, ImexEuler };

struct SimConfig {
    int N = 48;
    int m = 401; // quadrature grid nodes; de-aliasing requires m >= 4N+1
    double dt = 1e-3;
    double T = 10.0;
    Scheme scheme = Scheme::Etdrk2;
    int record_every = 0; // 0: choose automatically (~5000 records)
    std::vector<double> snapshot_times;

    void validate() const;
};

/** Boundary lifting H(z,t), the linear-in-z interpolant of the boundary data. */
double lift(double z, double t, const Disturbance& dist, double l);

/** Sine-basis coefficients of a scalar sampled function, by quadrature. */
Eigen::VectorXd project(const SampledFn& f, const SineBasis& basis);

/** V(v,x) = ||v||^2 + 2 x' int P12 v dz + x' P x, by quadrature. */
double lyapunov_V(const SampledFn& v, const Eigen::VectorXd& x, const P12Solution& p12,
                  const Eigen::MatrixXd& P);

/**
 * Time stepper for the projected cascade. Precomputes the projection
 * operators of B, D and the boundary lifting so a step costs two basis
 * transforms plus the pointwise nonlinearity.
 */
class Simulator {
  public:
    Simulator(const CouplingProblem& problem, const NonlinearitySpec& spec,
              const Disturbance& dist, const SimConfig& config);

    const SineBasis& basis() const { return basis_; }
    const Grid& grid() const { return grid_; }

    /** Full right-hand side (duhat, dx) of the projected system. */
    std::pair<Eigen::VectorXd, Eigen::VectorXd> rhs(const SpectralState& state) const;

    /** One time step with the configured scheme. */
    SpectralState step(const SpectralState& state, double dt) const;

    /** Advance from (phi, x0) over [0,T]; records norms and, when a coupling
     *  weight is supplied, V along v = u - w with w the heat extension. */
    Trajectory simulate(const SampledFn& phi, const Eigen::VectorXd& x0,
                        const P12Solution* p12 = nullptr) const;

  private:
    Eigen::VectorXd nonlinear_part(const Eigen::VectorXd& uhat, const Eigen::VectorXd& x,
                                   double t) const;
    Eigen::VectorXd x_rhs(const Eigen::VectorXd& uhat, const Eigen::VectorXd& x,
                          double t) const;
    Eigen::VectorXd heat_nonlinear_part(double t) const;
    void check_finite(const Eigen::VectorXd& uhat, const Eigen::VectorXd& x, double t) const;

    CouplingProblem problem_;
    NonlinearitySpec spec_;
    Disturbance dist_;
    SimConfig config_;
    Grid grid_;
    SineBasis basis_;
    Eigen::MatrixXd basis_values_; // m x N, e_j sampled
    Eigen::MatrixXd proj_op_;      // N x m, quadrature projection
    Eigen::VectorXd quad_w_;       // Simpson weights
    Eigen::MatrixXd proj_B_;       // N x n
    Eigen::MatrixXd D_modes_;      // n x N, int D e_j dz
    Eigen::VectorXd proj_zl_, proj_lz_;   // projections of z/l and (l-z)/l
    Eigen::VectorXd int_D_zl_, int_D_lz_; // int D z/l dz, int D (l-z)/l dz
    Eigen::VectorXd exp_mu_, phi1_, phi2_; // ETDRK2 tables for the configured dt

    friend Trajectory simulate_heat_extension(double a, double l, const Disturbance& dist,
                                              const SimConfig& config);
};

/** Convenience wrapper constructing a Simulator and running one trajectory. */
Trajectory simulate(const CouplingProblem& problem, const NonlinearitySpec& spec,
                    const Disturbance& dist, const SampledFn& phi, const Eigen::VectorXd& x0,
                    const SimConfig& config, const P12Solution* p12 = nullptr);

/** Pure heat equation carrying the boundary disturbance; returns w = w~ + H
 *  with sup |w| over grid and recorded times in Trajectory::sup_abs. */
Trajectory simulate_heat_extension(double a, double l, const Disturbance& dist,
                                   const SimConfig& config);

} // namespace certkit

#endif
