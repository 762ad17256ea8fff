#ifndef CERTKIT_FUNCTIONS_HPP
#define CERTKIT_FUNCTIONS_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace certkit {

/** A scalar function of one variable with an analytic derivative. */
struct ScalarFn {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::string name;

    double operator()(double s) const { return value(s); }
    bool empty() const { return !value; }
};

/** A vector field on R^n. */
struct VectorField {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
    std::string name;

    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return value(x); }
    bool empty() const { return !value; }
};

// Built-in scalar functions. These cover every shape the configuration
// schema accepts for B, D, f, f1 and the disturbance signals.
ScalarFn fn_zero();
ScalarFn fn_constant(double c);
ScalarFn fn_linear(double slope);
ScalarFn fn_polynomial(std::vector<double> coeffs); // c0 + c1 s + c2 s^2 + ...
ScalarFn fn_sin(double amplitude, double frequency, double phase = 0.0);
ScalarFn fn_cos(double amplitude, double frequency, double phase = 0.0);
ScalarFn fn_exp_ramp(double amplitude, double rate); // amplitude (1 - e^{-rate s})
ScalarFn fn_cubic_damping(double gain);              // -gain s^3

/** Pointwise product (used for ramp-enveloped disturbance signals). */
ScalarFn fn_product(const ScalarFn& a, const ScalarFn& b);
/** Pointwise sum (used to assemble f = f0 + f1). */
ScalarFn fn_sum(const ScalarFn& a, const ScalarFn& b);

// Built-in vector fields for the ODE nonlinearity X.
VectorField vf_zero();
/** X(x) = -gain ||x||^(power-1) x, an odd damping field with ||X|| = gain ||x||^power. */
VectorField vf_odd_damping(double gain, double power);

} // namespace certkit

#endif
