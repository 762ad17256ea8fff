#ifndef CERTKIT_GRIDFN_HPP
#define CERTKIT_GRIDFN_HPP

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace certkit {

/** Uniform grid on [0,l] with an odd node count (composite Simpson requirement). */
struct Grid {
    double l = 1.0;
    int m = 401;

    static Grid uniform(double l, int m);

    double h() const { return l / (m - 1); }
    double node(int i) const { return i * l / (m - 1); }
    std::vector<double> nodes() const;

    bool operator==(const Grid& other) const { return l == other.l && m == other.m; }
};

/** A function sampled on a grid, with k components per node (k >= 1). */
class SampledFn {
  public:
    SampledFn(Grid grid, Eigen::MatrixXd values);

    static SampledFn zero(Grid grid, int components = 1);
    static SampledFn from_scalar(Grid grid, const std::function<double(double)>& f);
    static SampledFn from_components(Grid grid,
                                     const std::vector<std::function<double(double)>>& comps);

    const Grid& grid() const { return grid_; }
    int components() const { return static_cast<int>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::MatrixXd& values() { return values_; }

    /** Component vector at node i (row of the sample matrix). */
    Eigen::VectorXd at(int i) const { return values_.row(i).transpose(); }

  private:
    Grid grid_;
    Eigen::MatrixXd values_; // m x k
};

/** Composite Simpson integral of a scalar-valued sampled function over [0,l]. */
double integrate(const SampledFn& f);

/**
 * L^p norm for p in [1,inf]; vector-valued samples take the euclidean norm
 * pointwise before the scalar L^p integral. p = inf is the max over nodes.
 */
double lp_norm(const SampledFn& f, double p);

/** L^2 inner product; vector-valued functions sum over components. */
double inner(const SampledFn& f, const SampledFn& g);

constexpr double inf_norm_order = std::numeric_limits<double>::infinity();

/** Composite Simpson over equally spaced samples (odd count). */
double simpson(std::span<const double> v, double h);

/**
 * Integral of a smooth sampled integrand over the prefix [z_0, z_i].
 * Order-4 accurate for every i: Simpson on even interval counts, Simpson
 * plus the 3/8 rule on odd counts, a one-sided cubic rule for i = 1.
 */
double integrate_prefix(std::span<const double> v, double h, int i);

} // namespace certkit

#endif
