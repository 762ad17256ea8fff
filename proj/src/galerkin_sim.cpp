#include "certkit/galerkin_sim.hpp"

#include "certkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace certkit {

namespace {

constexpr double kBlowupThreshold = 1e12;

Eigen::VectorXd simpson_weights(const Grid& grid) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.m);
    const double h = grid.h();
    w(0) = w(grid.m - 1) = h / 3.0;
    for (int i = 1; i < grid.m - 1; ++i)
        w(i) = (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
    return w;
}

} // namespace

SineBasis::SineBasis(int N_in, double l_in, double a_in) : N(N_in), l(l_in), a(a_in) {
    if (N < 1)
        throw config_error("sine basis: mode count must be >= 1");
    if (!(l > 0.0) || !(a > 0.0))
        throw config_error("sine basis: l and a must be positive");
    mu.resize(N);
    for (int j = 1; j <= N; ++j)
        mu(j - 1) = -a * a * std::pow(M_PI * j / l, 2);
}

double SineBasis::eval(int j, double z) const {
    return std::sqrt(2.0 / l) * std::sin(M_PI * j * z / l);
}

Disturbance Disturbance::none() { return {fn_zero(), fn_zero(), 0.0}; }

void Disturbance::check(double T) const {
    if (d1.empty() || d2.empty())
        throw config_error("disturbance: signals d1 and d2 must be evaluable");
    if (!d1.deriv || !d2.deriv)
        throw config_error("disturbance: signals need derivative evaluators");
    if (std::abs(d1.value(0.0)) > 1e-12 || std::abs(d2.value(0.0)) > 1e-12)
        throw config_error("disturbance: signals must vanish at t = 0");
    const int samples = 2048;
    for (int i = 0; i <= samples; ++i) {
        const double t = T * i / samples;
        if (std::abs(d1.value(t)) > d_inf * (1.0 + 1e-9) + 1e-12 ||
            std::abs(d2.value(t)) > d_inf * (1.0 + 1e-9) + 1e-12)
            throw config_error("disturbance: |d_i(t)| exceeds d_inf at t = " +
                               std::to_string(t));
    }
}

void SimConfig::validate() const {
    if (N < 1)
        throw config_error("simulation: N must be >= 1");
    if (m < 3 || m % 2 == 0)
        throw config_error("simulation: grid nodes m must be odd and >= 3");
    if (m < 4 * N + 1)
        throw config_error("simulation: de-aliasing requires m >= 4N+1 grid nodes");
    if (!(dt > 0.0) || !(T >= 0.0))
        throw config_error("simulation: need dt > 0 and T >= 0");
    if (record_every < 0)
        throw config_error("simulation: record_every must be >= 0");
}

double lift(double z, double t, const Disturbance& dist, double l) {
    return z / l * dist.d2.value(t) + (l - z) / l * dist.d1.value(t);
}

Eigen::VectorXd project(const SampledFn& f, const SineBasis& basis) {
    if (f.components() != 1)
        throw domain_error("project: expected a scalar-valued sampled function");
    const Grid& grid = f.grid();
    const Eigen::VectorXd w = simpson_weights(grid);
    Eigen::VectorXd coeffs(basis.N);
    for (int j = 1; j <= basis.N; ++j) {
        double acc = 0.0;
        for (int i = 0; i < grid.m; ++i)
            acc += w(i) * basis.eval(j, grid.node(i)) * f.values()(i, 0);
        coeffs(j - 1) = acc;
    }
    return coeffs;
}

double lyapunov_V(const SampledFn& v, const Eigen::VectorXd& x, const P12Solution& p12,
                  const Eigen::MatrixXd& P) {
    if (!(v.grid() == p12.values.grid()))
        throw domain_error("lyapunov_V: v and the coupling weight live on different grids");
    const Eigen::VectorXd w = simpson_weights(v.grid());
    const Eigen::VectorXd vv = v.values().col(0);
    const double norm2 = (w.array() * vv.array().square()).sum();
    const Eigen::VectorXd cross = p12.values.values().transpose() * (w.array() * vv.array()).matrix();
    return norm2 + 2.0 * x.dot(cross) + x.dot(P * x);
}

Simulator::Simulator(const CouplingProblem& problem, const NonlinearitySpec& spec,
                     const Disturbance& dist, const SimConfig& config)
    : problem_(problem), spec_(spec), dist_(dist), config_(config),
      grid_(Grid::uniform(problem.l(), config.m)), basis_(config.N, problem.l(), problem.a) {
    config_.validate();
    spec_.validate();
    dist_.check(config_.T);
    if (spec_.f.empty())
        throw config_error("simulation: nonlinearity handle f is not evaluable");
    if (spec_.X.empty())
        throw config_error("simulation: nonlinearity handle X is not evaluable");
    if (!(problem_.grid() == grid_)) {
        // resample B and D onto the simulation grid is not supported; the
        // problem must be built on the grid the simulation uses
        throw config_error("simulation: problem grid must match the simulation grid (m = " +
                           std::to_string(config_.m) + ")");
    }

    const int m = grid_.m;
    const int N = config_.N;
    quad_w_ = simpson_weights(grid_);
    basis_values_.resize(m, N);
    for (int i = 0; i < m; ++i)
        for (int j = 1; j <= N; ++j)
            basis_values_(i, j - 1) = basis_.eval(j, grid_.node(i));
    proj_op_ = basis_values_.transpose() * quad_w_.asDiagonal();

    proj_B_ = proj_op_ * problem_.B.values();                       // N x n
    D_modes_ = (quad_w_.asDiagonal() * problem_.D.values()).transpose() * basis_values_;

    Eigen::VectorXd zl(m), lz(m);
    for (int i = 0; i < m; ++i) {
        zl(i) = grid_.node(i) / grid_.l;
        lz(i) = (grid_.l - grid_.node(i)) / grid_.l;
    }
    proj_zl_ = proj_op_ * zl;
    proj_lz_ = proj_op_ * lz;
    int_D_zl_ = problem_.D.values().transpose() * (quad_w_.array() * zl.array()).matrix();
    int_D_lz_ = problem_.D.values().transpose() * (quad_w_.array() * lz.array()).matrix();

    exp_mu_.resize(N);
    phi1_.resize(N);
    phi2_.resize(N);
    for (int j = 0; j < N; ++j) {
        const double z = basis_.mu(j) * config_.dt;
        exp_mu_(j) = std::exp(z);
        phi1_(j) = std::expm1(z) / z;
        phi2_(j) = (std::expm1(z) - z) / (z * z);
    }
}

void Simulator::check_finite(const Eigen::VectorXd& uhat, const Eigen::VectorXd& x,
                             double t) const {
    if (!uhat.allFinite() || !x.allFinite() ||
        uhat.cwiseAbs().maxCoeff() > kBlowupThreshold ||
        (x.size() > 0 && x.cwiseAbs().maxCoeff() > kBlowupThreshold))
        throw divergence_error("simulation diverged at t = " + std::to_string(t), t);
}

Eigen::VectorXd Simulator::nonlinear_part(const Eigen::VectorXd& uhat,
                                          const Eigen::VectorXd& x, double t) const {
    const int m = grid_.m;
    const double d1 = dist_.d1.value(t), d2 = dist_.d2.value(t);
    const double d1t = dist_.d1.deriv(t), d2t = dist_.d2.deriv(t);
    Eigen::VectorXd ugrid = basis_values_ * uhat;
    Eigen::VectorXd fval(m);
    for (int i = 0; i < m; ++i) {
        const double z = grid_.node(i);
        const double w = ugrid(i) + z / grid_.l * d2 + (grid_.l - z) / grid_.l * d1;
        fval(i) = spec_.f.value(w);
        if (!std::isfinite(fval(i)))
            throw domain_error("nonlinearity produced a non-finite value at z = " +
                               std::to_string(z) + ", t = " + std::to_string(t));
    }
    return proj_op_ * fval + proj_B_ * x - (proj_lz_ * d1t + proj_zl_ * d2t);
}

Eigen::VectorXd Simulator::x_rhs(const Eigen::VectorXd& uhat, const Eigen::VectorXd& x,
                                 double t) const {
    return problem_.C * x + spec_.X(x) + D_modes_ * uhat + int_D_lz_ * dist_.d1.value(t) +
           int_D_zl_ * dist_.d2.value(t);
}

Eigen::VectorXd Simulator::heat_nonlinear_part(double t) const {
    return -(proj_lz_ * dist_.d1.deriv(t) + proj_zl_ * dist_.d2.deriv(t));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> Simulator::rhs(const SpectralState& state) const {
    check_finite(state.uhat, state.x, state.t);
    Eigen::VectorXd duhat = basis_.mu.cwiseProduct(state.uhat) +
                            nonlinear_part(state.uhat, state.x, state.t);
    return {duhat, x_rhs(state.uhat, state.x, state.t)};
}

SpectralState Simulator::step(const SpectralState& state, double dt) const {
    Eigen::VectorXd exp_mu = exp_mu_, phi1 = phi1_, phi2 = phi2_;
    if (dt != config_.dt) {
        for (int j = 0; j < basis_.N; ++j) {
            const double z = basis_.mu(j) * dt;
            exp_mu(j) = std::exp(z);
            phi1(j) = std::expm1(z) / z;
            phi2(j) = (std::expm1(z) - z) / (z * z);
        }
    }
    SpectralState out;
    out.t = state.t + dt;
    if (config_.scheme == Scheme::ImexEuler) {
        const Eigen::VectorXd nl = nonlinear_part(state.uhat, state.x, state.t);
        out.uhat = (state.uhat + dt * nl).array() /
                   (1.0 - dt * basis_.mu.array());
        out.x = state.x + dt * x_rhs(state.uhat, state.x, state.t);
    } else {
        const Eigen::VectorXd nl1 = nonlinear_part(state.uhat, state.x, state.t);
        const Eigen::VectorXd dx1 = x_rhs(state.uhat, state.x, state.t);
        const Eigen::VectorXd ua =
            exp_mu.cwiseProduct(state.uhat) + dt * phi1.cwiseProduct(nl1);
        const Eigen::VectorXd xa = state.x + dt * dx1;
        const Eigen::VectorXd nl2 = nonlinear_part(ua, xa, state.t + dt);
        const Eigen::VectorXd dx2 = x_rhs(ua, xa, state.t + dt);
        out.uhat = ua + dt * phi2.cwiseProduct(nl2 - nl1);
        out.x = state.x + 0.5 * dt * (dx1 + dx2);
    }
    check_finite(out.uhat, out.x, out.t);
    return out;
}

Trajectory Simulator::simulate(const SampledFn& phi, const Eigen::VectorXd& x0,
                               const P12Solution* p12) const {
    if (!(phi.grid() == grid_) || phi.components() != 1)
        throw domain_error("simulate: initial profile must be scalar on the simulation grid");
    if (x0.size() != problem_.dim())
        throw domain_error("simulate: initial ODE state has wrong dimension");
    if (p12 && !(p12->values.grid() == grid_))
        throw domain_error("simulate: coupling weight must live on the simulation grid");

    const int nsteps = static_cast<int>(std::llround(config_.T / config_.dt));
    int stride = config_.record_every;
    if (stride <= 0)
        stride = std::max(1, (nsteps + 4999) / 5000);

    SpectralState state{project(phi, basis_), x0, 0.0};
    Eigen::VectorXd what;           // heat-extension coefficients, lockstep
    const bool track_w = p12 != nullptr;
    if (track_w)
        what = Eigen::VectorXd::Zero(config_.N);

    std::vector<double> snap_times = config_.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    size_t snap_idx = 0;

    Eigen::VectorXd zl(grid_.m), lz(grid_.m);
    for (int i = 0; i < grid_.m; ++i) {
        zl(i) = grid_.node(i) / grid_.l;
        lz(i) = (grid_.l - grid_.node(i)) / grid_.l;
    }

    Trajectory traj;
    auto record = [&]() {
        const double t = state.t;
        const Eigen::VectorXd ugrid = basis_values_ * state.uhat;
        const Eigen::VectorXd Hgrid = dist_.d1.value(t) * lz + dist_.d2.value(t) * zl;
        // Parseval for the lifted part, quadrature for the cross terms
        const double u2 = state.uhat.squaredNorm() +
                          2.0 * (quad_w_.array() * ugrid.array() * Hgrid.array()).sum() +
                          (quad_w_.array() * Hgrid.array().square()).sum();
        traj.times.push_back(t);
        traj.u_l2.push_back(std::sqrt(std::max(u2, 0.0)));
        traj.x_norm.push_back(state.x.norm());
        traj.sup_abs = std::max(traj.sup_abs, (ugrid + Hgrid).cwiseAbs().maxCoeff());
        if (track_w) {
            const Eigen::VectorXd vgrid = basis_values_ * (state.uhat - what);
            SampledFn v(grid_, vgrid);
            traj.V.push_back(lyapunov_V(v, state.x, *p12, problem_.P));
        }
        while (snap_idx < snap_times.size() && t >= snap_times[snap_idx] - config_.dt / 2.0) {
            traj.snapshots.emplace_back(t, state.uhat);
            ++snap_idx;
        }
    };

    for (int s = 0;; ++s) {
        state.t = s * config_.dt; // exact multiples, no accumulated drift
        if (s % stride == 0 || s == nsteps)
            record();
        if (s == nsteps)
            break;
        if (track_w) {
            // advance the heat extension with the same scheme and step
            const double t = state.t, dt = config_.dt;
            if (config_.scheme == Scheme::ImexEuler) {
                what = (what + dt * heat_nonlinear_part(t)).array() /
                       (1.0 - dt * basis_.mu.array());
            } else {
                const Eigen::VectorXd nl1 = heat_nonlinear_part(t);
                const Eigen::VectorXd wa =
                    exp_mu_.cwiseProduct(what) + dt * phi1_.cwiseProduct(nl1);
                const Eigen::VectorXd nl2 = heat_nonlinear_part(t + dt);
                what = wa + dt * phi2_.cwiseProduct(nl2 - nl1);
            }
        }
        state = step(state, config_.dt);
    }
    return traj;
}

Trajectory simulate(const CouplingProblem& problem, const NonlinearitySpec& spec,
                    const Disturbance& dist, const SampledFn& phi, const Eigen::VectorXd& x0,
                    const SimConfig& config, const P12Solution* p12) {
    Simulator sim(problem, spec, dist, config);
    return sim.simulate(phi, x0, p12);
}

Trajectory simulate_heat_extension(double a, double l, const Disturbance& dist,
                                   const SimConfig& config) {
    const Grid grid = Grid::uniform(l, config.m);
    const SampledFn zero_fn = SampledFn::zero(grid, 1);
    CouplingProblem heat(a, Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Identity(1, 1),
                         zero_fn, zero_fn);
    NonlinearitySpec spec;
    spec.mode = NonlinearityMode::GloballyLipschitz;
    spec.f = fn_zero();
    spec.X = vf_zero();
    Simulator sim(heat, spec, dist, config);
    return sim.simulate(zero_fn, Eigen::VectorXd::Zero(1), nullptr);
}

} // namespace certkit
