#include "invsrc/media_sources.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace invsrc {

namespace {

constexpr double domain_radius = 2.0; // paper ball B(0, 2)

} // namespace

RadialPolynomial::RadialPolynomial(std::vector<double> coeffs, double rho)
    : coeffs_(std::move(coeffs)), rho_(rho) {
    if (!(rho_ > 0.0)) {
        throw std::invalid_argument("RadialPolynomial: rho must be positive");
    }
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
    if (coeffs_.empty()) {
        coeffs_.push_back(0.0);
    }
}

double RadialPolynomial::operator()(double r) const {
    if (r < 0.0 || r > rho_) {
        return 0.0;
    }
    double p = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        p = p * r + coeffs_[i];
    }
    return p;
}

bool RadialPolynomial::even_powers_only() const {
    for (std::size_t i = 1; i < coeffs_.size(); i += 2) {
        if (coeffs_[i] != 0.0) {
            return false;
        }
    }
    return true;
}

int RadialPolynomial::vanishing_order_at_rho() const {
    double scale = 0.0;
    for (double c : coeffs_) {
        scale = std::max(scale, std::abs(c));
    }
    if (scale == 0.0) {
        return static_cast<int>(coeffs_.size());
    }
    std::vector<double> work = coeffs_;
    int order = 0;
    while (work.size() > 1) {
        // Synthetic division by (r - rho): remainder is the value at rho.
        std::vector<double> q(work.size() - 1);
        double carry = work.back();
        for (std::size_t i = work.size() - 1; i-- > 0;) {
            q[i] = carry;
            carry = work[i] + carry * rho_;
        }
        if (std::abs(carry) > 1e-12 * scale) {
            break;
        }
        ++order;
        work = std::move(q);
    }
    return order;
}

MediumSpec paper_medium() {
    ProfileSegment shell_a{0.75, 1.0, {0.5}, 0.0, 0.0};
    ProfileSegment shell_b{0.75, 1.0, {2.0}, 0.0, 0.0};
    MediumSpec m;
    m.a = PiecewiseRadialProfile({shell_a}, 1.0, domain_radius);
    m.b = PiecewiseRadialProfile({shell_b}, 1.0, domain_radius);
    m.h_kind = HKind::constant_one;
    m.a0 = 0.5;
    return m;
}

MediumSpec homogeneous_medium() {
    MediumSpec m;
    const double unbounded = std::numeric_limits<double>::infinity();
    m.a = PiecewiseRadialProfile({}, 1.0, unbounded);
    m.b = PiecewiseRadialProfile({}, 1.0, unbounded);
    m.h_kind = HKind::constant_one;
    m.a0 = 1.0;
    return m;
}

SourceSpec source_f1() {
    ProfileSegment core{0.0, 0.5, {1.0}, 0.0, 0.0};
    SourceSpec s;
    s.f = PiecewiseRadialProfile({core}, 0.0, domain_radius);
    s.support_radius = 0.5;
    return s;
}

SourceSpec source_f2() {
    ProfileSegment core{0.0, 0.5, {1.0}, 1.0, 2.0 * std::numbers::pi};
    SourceSpec s;
    s.f = PiecewiseRadialProfile({core}, 0.0, domain_radius);
    s.support_radius = 0.5;
    return s;
}

Complex h_eval(const MediumSpec& m, double k) {
    if (!(k > 0.0)) {
        throw std::invalid_argument("h_eval: k must be positive");
    }
    switch (m.h_kind) {
    case HKind::constant_one:
        return Complex{1.0, 0.0};
    case HKind::i_times_k:
        return Complex{0.0, k};
    }
    throw std::logic_error("h_eval: unknown h kind");
}

RadialPolynomial radial_laplacian_poly(const RadialPolynomial& p) {
    if (!p.even_powers_only()) {
        throw std::invalid_argument(
            "radial_laplacian_poly: odd powers present (not smooth at origin)");
    }
    const auto& c = p.coeffs();
    if (c.size() <= 2) {
        return RadialPolynomial({0.0}, p.rho());
    }
    // Delta r^n = n (n+1) r^(n-2) for radial monomials in 3-D.
    std::vector<double> out(c.size() - 2, 0.0);
    for (std::size_t n = 2; n < c.size(); ++n) {
        out[n - 2] = static_cast<double>(n) * static_cast<double>(n + 1) * c[n];
    }
    return RadialPolynomial(std::move(out), p.rho());
}

RadialPolynomial nonradiating_bump(double rho) {
    if (!(rho > 0.0)) {
        throw std::invalid_argument("nonradiating_bump: rho must be positive");
    }
    // (rho^2 - r^2)^5, binomial expansion in r^2. Powers of rho^2 are built by
    // repeated multiplication so dyadic rho keeps every coefficient exact.
    const double r2 = rho * rho;
    std::vector<double> pow_r2(6, 1.0);
    for (int j = 1; j <= 5; ++j) {
        pow_r2[j] = pow_r2[j - 1] * r2;
    }
    std::vector<double> coeffs(11, 0.0);
    double binom = 1.0;
    for (int j = 0; j <= 5; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        coeffs[2 * j] = sign * binom * pow_r2[5 - j];
        binom = binom * (5 - j) / (j + 1);
    }
    return RadialPolynomial(std::move(coeffs), rho);
}

SourceSpec make_nonradiating(const RadialPolynomial& w, double k1, double k2) {
    if (!(k1 > 0.0) || !(k2 > 0.0)) {
        throw std::invalid_argument("make_nonradiating: frequencies must be positive");
    }
    if (k1 == k2) {
        throw std::invalid_argument("make_nonradiating: frequencies must differ");
    }
    if (w.vanishing_order_at_rho() < 5) {
        throw std::invalid_argument(
            "make_nonradiating: w needs four vanishing derivatives at rho");
    }
    const RadialPolynomial lap = radial_laplacian_poly(w);
    const RadialPolynomial lap2 = radial_laplacian_poly(lap);

    const double sum_k2 = k1 * k1 + k2 * k2;
    const double prod_k2 = (k1 * k1) * (k2 * k2);

    std::vector<double> g(std::max({lap2.coeffs().size(), lap.coeffs().size(),
                                    w.coeffs().size()}),
                          0.0);
    for (std::size_t i = 0; i < lap2.coeffs().size(); ++i) {
        g[i] += lap2.coeffs()[i];
    }
    for (std::size_t i = 0; i < lap.coeffs().size(); ++i) {
        g[i] += sum_k2 * lap.coeffs()[i];
    }
    for (std::size_t i = 0; i < w.coeffs().size(); ++i) {
        g[i] += prod_k2 * w.coeffs()[i];
    }
    return polynomial_source(RadialPolynomial(std::move(g), w.rho()));
}

SourceSpec polynomial_source(const RadialPolynomial& p) {
    ProfileSegment seg{0.0, p.rho(), p.coeffs(), 0.0, 0.0};
    SourceSpec s;
    s.f = PiecewiseRadialProfile({seg}, 0.0,
                                 std::numeric_limits<double>::infinity());
    s.support_radius = p.rho();
    return s;
}

} // namespace invsrc
