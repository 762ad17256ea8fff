#include "certkit/functions.hpp"

#include <cmath>

namespace certkit {

ScalarFn fn_zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, "zero"};
}

ScalarFn fn_constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; },
            "constant(" + std::to_string(c) + ")"};
}

ScalarFn fn_linear(double slope) {
    return {[slope](double s) { return slope * s; }, [slope](double) { return slope; },
            "linear(" + std::to_string(slope) + ")"};
}

ScalarFn fn_polynomial(std::vector<double> coeffs) {
    auto val = [coeffs](double s) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
            acc = acc * s + *it;
        return acc;
    };
    auto der = [coeffs](double s) {
        double acc = 0.0;
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k)
            acc = acc * s + k * coeffs[k];
        return acc;
    };
    return {val, der, "polynomial"};
}

ScalarFn fn_sin(double amplitude, double frequency, double phase) {
    return {[=](double s) { return amplitude * std::sin(frequency * s + phase); },
            [=](double s) { return amplitude * frequency * std::cos(frequency * s + phase); },
            "sin"};
}

ScalarFn fn_cos(double amplitude, double frequency, double phase) {
    return {[=](double s) { return amplitude * std::cos(frequency * s + phase); },
            [=](double s) { return -amplitude * frequency * std::sin(frequency * s + phase); },
            "cos"};
}

ScalarFn fn_exp_ramp(double amplitude, double rate) {
    return {[=](double s) { return amplitude * (1.0 - std::exp(-rate * s)); },
            [=](double s) { return amplitude * rate * std::exp(-rate * s); }, "exp_ramp"};
}

ScalarFn fn_cubic_damping(double gain) {
    return {[gain](double s) { return -gain * s * s * s; },
            [gain](double s) { return -3.0 * gain * s * s; }, "cubic_damping"};
}

ScalarFn fn_product(const ScalarFn& a, const ScalarFn& b) {
    auto av = a.value, bv = b.value, ad = a.deriv, bd = b.deriv;
    return {[av, bv](double s) { return av(s) * bv(s); },
            [av, bv, ad, bd](double s) { return ad(s) * bv(s) + av(s) * bd(s); },
            a.name + "*" + b.name};
}

ScalarFn fn_sum(const ScalarFn& a, const ScalarFn& b) {
    auto av = a.value, bv = b.value, ad = a.deriv, bd = b.deriv;
    return {[av, bv](double s) { return av(s) + bv(s); },
            [ad, bd](double s) { return ad(s) + bd(s); }, a.name + "+" + b.name};
}

VectorField vf_zero() {
    return {[](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()).eval(); },
            "zero"};
}

VectorField vf_odd_damping(double gain, double power) {
    return {[gain, power](const Eigen::VectorXd& x) {
                const double r = x.norm();
                if (r == 0.0)
                    return Eigen::VectorXd::Zero(x.size()).eval();
                return (-gain * std::pow(r, power - 1.0) * x).eval();
            },
            "odd_damping"};
}

} // namespace certkit
