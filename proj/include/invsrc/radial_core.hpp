#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace invsrc {

using Complex = std::complex<double>;

// Radial mesh on [0, R]. Nodes are strictly increasing with nodes[0] = 0 and
// nodes.back() = R; every declared breakpoint coincides with a node, so no
// element straddles a coefficient discontinuity.
struct RadialGrid {
    double R = 0.0;
    std::vector<double> nodes;
    std::vector<double> breakpoints;

    std::size_t size() const { return nodes.size(); }
    std::size_t num_elements() const { return nodes.size() - 1; }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Uniform n-node grid on [0, R] with each breakpoint snapped onto the nearest
// interior node. Throws std::invalid_argument on bad input (R <= 0, n < 3,
// breakpoints outside (0, R), or breakpoints too close to resolve).
GridPtr build_grid(double R, std::size_t n, std::vector<double> breakpoints = {});

// One piece of a piecewise radial coefficient: a polynomial in r (ascending
// powers) plus an optional cosine term, valid on the closed interval
// [r_lo, r_hi].
struct ProfileSegment {
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::vector<double> poly;
    double cos_amp = 0.0;
    double cos_omega = 0.0;

    double value(double r) const;
};

// Real coefficient or source value as a function of radius. Segments are
// non-overlapping and ordered; outside all segments the profile takes the
// background value. At a breakpoint shared by two segments the left segment
// wins (first match in segment order).
class PiecewiseRadialProfile {
public:
    PiecewiseRadialProfile() = default;
    PiecewiseRadialProfile(std::vector<ProfileSegment> segments, double background,
                           double r_max);

    double operator()(double r) const;

    const std::vector<ProfileSegment>& segments() const { return segments_; }
    double background() const { return background_; }
    double r_max() const { return r_max_; }

    // Segment endpoints strictly inside (0, r_limit); these must become grid
    // nodes so quadrature never crosses a jump.
    std::vector<double> interior_knots(double r_limit) const;

private:
    std::vector<ProfileSegment> segments_;
    double background_ = 0.0;
    double r_max_ = 0.0;
};

double eval_profile(const PiecewiseRadialProfile& p, double r);

// Complex nodal field on a radial grid at one frequency.
struct RadialField {
    GridPtr grid;
    std::vector<Complex> values;
    double k = 0.0;

    Complex trace() const { return values.back(); }
};

RadialField make_field(GridPtr grid, double k);

bool same_grid(const RadialField& a, const RadialField& b);

// 4*pi * integral_0^R A(r) conj(B(r)) r^2 dr with A, B the piecewise-linear
// nodal interpolants; per-element 3-point Gauss (exact through degree 5, the
// linear*linear*r^2 integrand is quartic). Conjugate-linear in B. Summation
// order is fixed (element 0 upward) so results do not depend on caller
// parallelism.
Complex inner_product_volume(const RadialField& a, const RadialField& b);

// sqrt(inner_product_volume(a, a)).
double norm_volume(const RadialField& a);

// Same quadrature with an extra profile weight w(r) evaluated at the Gauss
// points: 4*pi * integral A conj(B) w r^2 dr.
Complex inner_product_volume_weighted(const RadialField& a, const RadialField& b,
                                      const PiecewiseRadialProfile& w);

// 4*pi*R^2 * s * conj(t): L^2 pairing on the sphere of radius R for traces
// that are constant over the sphere.
Complex boundary_inner_product(Complex s, Complex t, double R);

// 4*pi * integral_0^R p(r) conj(B(r)) r^2 dr with p evaluated at the Gauss
// points of every element (not interpolated). This matches the load-vector
// quadrature of the solvers, so pairings of a source profile against a
// discrete field are consistent with the assembled right-hand side.
Complex pair_profile_field(const PiecewiseRadialProfile& p, const RadialField& b);

// L^2(Omega) norm of a profile, same per-element quadrature.
double norm_profile(const PiecewiseRadialProfile& p, const RadialGrid& grid);

namespace quadrature {

// 3-point Gauss-Legendre on [a, b]; calls fn(r, weight) in fixed order.
template <typename Fn>
void gauss3(double a, double b, Fn&& fn) {
    constexpr double q = 0.7745966692414834; // sqrt(3/5)
    constexpr double w0 = 0.8888888888888888; // 8/9
    constexpr double w1 = 0.5555555555555556; // 5/9
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    fn(mid - q * half, w1 * half);
    fn(mid, w0 * half);
    fn(mid + q * half, w1 * half);
}

} // namespace quadrature

} // namespace invsrc
