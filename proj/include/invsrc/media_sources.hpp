#pragma once

#include "invsrc/radial_core.hpp"

namespace invsrc {

enum class HKind { constant_one, i_times_k };

// Medium coefficients a(r), b(r) and the frequency weight h(k). The
// perturbations 1-a and 1-b are supported strictly inside the ball, a is
// uniformly elliptic (a >= a0 > 0) and b is positive and bounded.
struct MediumSpec {
    PiecewiseRadialProfile a;
    PiecewiseRadialProfile b;
    HKind h_kind = HKind::constant_one;
    double a0 = 1.0;
};

// Spatial source profile f(r), vanishing beyond support_radius < R.
struct SourceSpec {
    PiecewiseRadialProfile f;
    double support_radius = 0.0;
};

// Polynomial in r supported on [0, rho]; evaluation outside [0, rho] is
// exactly zero. Coefficients are stored in ascending powers; the canonical
// bump (rho^2 - r^2)^5 with dyadic rho has exactly representable
// coefficients, so repeated Laplacians stay exact.
class RadialPolynomial {
public:
    RadialPolynomial() = default;
    RadialPolynomial(std::vector<double> coeffs, double rho);

    double operator()(double r) const;

    const std::vector<double>& coeffs() const { return coeffs_; }
    double rho() const { return rho_; }
    bool even_powers_only() const;

    // Multiplicity of the root at r = rho (how many derivatives vanish there,
    // plus one). Exact synthetic division with a relative tolerance on the
    // remainder.
    int vanishing_order_at_rho() const;

private:
    std::vector<double> coeffs_;
    double rho_ = 0.0;
};

// Paper media: a = 1/2 and b = 2 on the shell [3/4, 1], background 1 (the
// hypotheses 0 < a0 <= a and supp(1-a), supp(1-b) inside the ball force
// background 1); h == 1.
MediumSpec paper_medium();

// a == b == 1, h == 1.
MediumSpec homogeneous_medium();

// f1: indicator of r <= 1/2. f2: 1 + cos(2*pi*r) for r <= 1/2, else 0.
SourceSpec source_f1();
SourceSpec source_f2();

// Frequency weight. Throws on k <= 0; never returns zero.
Complex h_eval(const MediumSpec& m, double k);

// 3-D radial Laplacian via the exact monomial rule Delta r^n = n(n+1) r^(n-2).
// Requires even powers only (smoothness at the origin).
RadialPolynomial radial_laplacian_poly(const RadialPolynomial& p);

// (rho^2 - r^2)^5 on [0, rho]: the canonical compactly supported bump with
// four derivatives vanishing at rho.
RadialPolynomial nonradiating_bump(double rho);

// g = (Delta + k1^2)(Delta + k2^2) w, expanded as
// Delta^2 w + (k1^2 + k2^2) Delta w + k1^2 k2^2 w so the two factor orders
// produce bit-identical coefficients. Requires w with at least four
// derivatives vanishing at rho (root multiplicity >= 5), otherwise g would be
// discontinuous.
SourceSpec make_nonradiating(const RadialPolynomial& w, double k1, double k2);

// Convert a polynomial into a source profile (segment [0, rho], background 0).
SourceSpec polynomial_source(const RadialPolynomial& p);

} // namespace invsrc
