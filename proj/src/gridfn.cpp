#include "certkit/gridfn.hpp"

#include "certkit/errors.hpp"

#include <cmath>

namespace certkit {

Grid Grid::uniform(double l, int m) {
    if (!(l > 0.0) || !std::isfinite(l))
        throw config_error("grid: interval length must be positive and finite");
    if (m < 3 || m % 2 == 0)
        throw config_error("grid: node count must be an odd integer >= 3, got " +
                           std::to_string(m));
    return Grid{l, m};
}

std::vector<double> Grid::nodes() const {
    std::vector<double> z(m);
    for (int i = 0; i < m; ++i)
        z[i] = node(i);
    z.front() = 0.0;
    z.back() = l;
    return z;
}

SampledFn::SampledFn(Grid grid, Eigen::MatrixXd values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid_.m)
        throw domain_error("sampled function: row count " + std::to_string(values_.rows()) +
                           " does not match grid node count " + std::to_string(grid_.m));
    if (values_.cols() < 1)
        throw domain_error("sampled function: needs at least one component");
    if (!values_.allFinite())
        throw domain_error("sampled function: samples contain non-finite entries");
}

SampledFn SampledFn::zero(Grid grid, int components) {
    return SampledFn(grid, Eigen::MatrixXd::Zero(grid.m, components));
}

SampledFn SampledFn::from_scalar(Grid grid, const std::function<double(double)>& f) {
    Eigen::MatrixXd v(grid.m, 1);
    for (int i = 0; i < grid.m; ++i)
        v(i, 0) = f(grid.node(i));
    return SampledFn(grid, std::move(v));
}

SampledFn SampledFn::from_components(Grid grid,
                                     const std::vector<std::function<double(double)>>& comps) {
    Eigen::MatrixXd v(grid.m, static_cast<int>(comps.size()));
    for (int i = 0; i < grid.m; ++i)
        for (int k = 0; k < static_cast<int>(comps.size()); ++k)
            v(i, k) = comps[k](grid.node(i));
    return SampledFn(grid, std::move(v));
}

double simpson(std::span<const double> v, double h) {
    const int n = static_cast<int>(v.size());
    if (n < 3 || n % 2 == 0)
        throw config_error("simpson: sample count must be odd and >= 3");
    double odds = 0.0, evens = 0.0;
    for (int i = 1; i < n - 1; i += 2)
        odds += v[i];
    for (int i = 2; i < n - 1; i += 2)
        evens += v[i];
    return h / 3.0 * (v[0] + v[n - 1] + 4.0 * odds + 2.0 * evens);
}

double integrate_prefix(std::span<const double> v, double h, int i) {
    const int n = static_cast<int>(v.size());
    if (i < 0 || i >= n)
        throw config_error("integrate_prefix: node index out of range");
    if (i == 0)
        return 0.0;
    if (i == 1) {
        if (n >= 4) // cubic through the first four nodes, integrated over [z0,z1]
            return h * (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]) / 24.0;
        return h * (5.0 * v[0] + 8.0 * v[1] - v[2]) / 12.0;
    }
    if (i % 2 == 0)
        return simpson(v.subspan(0, i + 1), h);
    // odd >= 3: Simpson up to i-3, then the 3/8 rule over the last three panels
    double base = (i > 3) ? simpson(v.subspan(0, i - 2), h) : 0.0;
    return base + 3.0 * h / 8.0 * (v[i - 3] + 3.0 * v[i - 2] + 3.0 * v[i - 1] + v[i]);
}

double integrate(const SampledFn& f) {
    if (f.components() != 1)
        throw domain_error("integrate: expected a scalar-valued sampled function");
    const auto& col = f.values().col(0);
    std::vector<double> v(col.data(), col.data() + col.size());
    return simpson(v, f.grid().h());
}

double lp_norm(const SampledFn& f, double p) {
    if (std::isnan(p) || p < 1.0)
        throw config_error("lp_norm: unsupported order p; need p >= 1 or infinity");
    const Eigen::VectorXd mag = f.values().rowwise().norm();
    if (std::isinf(p))
        return mag.maxCoeff();
    std::vector<double> v(mag.size());
    for (int i = 0; i < mag.size(); ++i)
        v[i] = std::pow(mag(i), p);
    const double integral = simpson(v, f.grid().h());
    return std::pow(std::max(integral, 0.0), 1.0 / p);
}

double inner(const SampledFn& f, const SampledFn& g) {
    if (!(f.grid() == g.grid()))
        throw domain_error("inner: sampled functions live on different grids");
    if (f.components() != g.components())
        throw domain_error("inner: component counts differ");
    const Eigen::VectorXd prod = (f.values().array() * g.values().array()).rowwise().sum();
    std::vector<double> v(prod.data(), prod.data() + prod.size());
    return simpson(v, f.grid().h());
}

} // namespace certkit
