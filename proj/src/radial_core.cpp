#include "invsrc/radial_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace invsrc {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

} // namespace

GridPtr build_grid(double R, std::size_t n, std::vector<double> breakpoints) {
    if (!(R > 0.0)) {
        throw std::invalid_argument("build_grid: R must be positive");
    }
    if (n < 3) {
        throw std::invalid_argument("build_grid: at least 3 nodes required");
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                      breakpoints.end());
    for (double b : breakpoints) {
        if (!(b > 0.0) || !(b < R)) {
            throw std::invalid_argument("build_grid: breakpoint outside (0, R)");
        }
    }

    auto grid = std::make_shared<RadialGrid>();
    grid->R = R;
    grid->nodes.resize(n);
    const double h = R / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        grid->nodes[i] = static_cast<double>(i) * h;
    }
    grid->nodes.back() = R;

    // Snap the nearest interior node onto each breakpoint. Breakpoints are
    // sorted, so assigning strictly increasing node indices keeps the mesh
    // monotone.
    std::size_t last_idx = 0;
    for (double b : breakpoints) {
        auto idx = static_cast<std::size_t>(std::lround(b / h));
        idx = std::clamp<std::size_t>(idx, 1, n - 2);
        if (idx <= last_idx && last_idx > 0) {
            idx = last_idx + 1;
        }
        if (idx > n - 2) {
            throw std::invalid_argument(
                "build_grid: too few nodes to resolve all breakpoints");
        }
        grid->nodes[idx] = b;
        last_idx = idx;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(grid->nodes[i] < grid->nodes[i + 1])) {
            throw std::invalid_argument(
                "build_grid: breakpoint snapping broke monotonicity");
        }
    }
    grid->breakpoints = std::move(breakpoints);
    return grid;
}

double ProfileSegment::value(double r) const {
    double p = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) {
        p = p * r + poly[i];
    }
    if (cos_amp != 0.0) {
        p += cos_amp * std::cos(cos_omega * r);
    }
    return p;
}

PiecewiseRadialProfile::PiecewiseRadialProfile(std::vector<ProfileSegment> segments,
                                               double background, double r_max)
    : segments_(std::move(segments)), background_(background), r_max_(r_max) {
    double prev_hi = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        if (!(s.r_lo >= 0.0) || !(s.r_hi > s.r_lo) || !(s.r_hi <= r_max_)) {
            throw std::invalid_argument("profile segment outside [0, r_max]");
        }
        if (i > 0 && s.r_lo < prev_hi) {
            throw std::invalid_argument("profile segments overlap");
        }
        prev_hi = s.r_hi;
    }
}

double PiecewiseRadialProfile::operator()(double r) const {
    if (!(r >= 0.0) || !(r <= r_max_)) {
        throw std::invalid_argument("profile evaluated outside [0, R]");
    }
    for (const auto& s : segments_) {
        if (r >= s.r_lo && r <= s.r_hi) {
            return s.value(r);
        }
    }
    return background_;
}

std::vector<double> PiecewiseRadialProfile::interior_knots(double r_limit) const {
    std::vector<double> knots;
    for (const auto& s : segments_) {
        for (double r : {s.r_lo, s.r_hi}) {
            if (r > 0.0 && r < r_limit) {
                knots.push_back(r);
            }
        }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    return knots;
}

double eval_profile(const PiecewiseRadialProfile& p, double r) { return p(r); }

RadialField make_field(GridPtr grid, double k) {
    if (!grid) {
        throw std::invalid_argument("make_field: null grid");
    }
    if (!(k > 0.0)) {
        throw std::invalid_argument("make_field: k must be positive");
    }
    RadialField f;
    f.grid = std::move(grid);
    f.values.assign(f.grid->size(), Complex{0.0, 0.0});
    f.k = k;
    return f;
}

bool same_grid(const RadialField& a, const RadialField& b) {
    return a.grid == b.grid;
}

Complex inner_product_volume(const RadialField& a, const RadialField& b) {
    if (!same_grid(a, b)) {
        throw std::invalid_argument("inner_product_volume: fields on different grids");
    }
    const auto& nodes = a.grid->nodes;
    Complex sum{0.0, 0.0};
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
        const double rl = nodes[e], rr = nodes[e + 1];
        const double inv_h = 1.0 / (rr - rl);
        const Complex al = a.values[e], ar = a.values[e + 1];
        const Complex bl = b.values[e], br = b.values[e + 1];
        Complex acc{0.0, 0.0};
        quadrature::gauss3(rl, rr, [&](double r, double w) {
            const double t = (r - rl) * inv_h;
            const Complex av = al + (ar - al) * t;
            const Complex bv = bl + (br - bl) * t;
            acc += w * r * r * av * std::conj(bv);
        });
        sum += acc;
    }
    return four_pi * sum;
}

double norm_volume(const RadialField& a) {
    const Complex ip = inner_product_volume(a, a);
    return std::sqrt(std::max(0.0, ip.real()));
}

Complex inner_product_volume_weighted(const RadialField& a, const RadialField& b,
                                      const PiecewiseRadialProfile& w) {
    if (!same_grid(a, b)) {
        throw std::invalid_argument(
            "inner_product_volume_weighted: fields on different grids");
    }
    const auto& nodes = a.grid->nodes;
    Complex sum{0.0, 0.0};
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
        const double rl = nodes[e], rr = nodes[e + 1];
        const double inv_h = 1.0 / (rr - rl);
        const Complex al = a.values[e], ar = a.values[e + 1];
        const Complex bl = b.values[e], br = b.values[e + 1];
        Complex acc{0.0, 0.0};
        quadrature::gauss3(rl, rr, [&](double r, double wq) {
            const double t = (r - rl) * inv_h;
            const Complex av = al + (ar - al) * t;
            const Complex bv = bl + (br - bl) * t;
            acc += wq * r * r * w(r) * av * std::conj(bv);
        });
        sum += acc;
    }
    return four_pi * sum;
}

Complex boundary_inner_product(Complex s, Complex t, double R) {
    if (!(R > 0.0)) {
        throw std::invalid_argument("boundary_inner_product: R must be positive");
    }
    return four_pi * R * R * s * std::conj(t);
}

Complex pair_profile_field(const PiecewiseRadialProfile& p, const RadialField& b) {
    const auto& nodes = b.grid->nodes;
    Complex sum{0.0, 0.0};
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
        const double rl = nodes[e], rr = nodes[e + 1];
        const double inv_h = 1.0 / (rr - rl);
        const Complex bl = b.values[e], br = b.values[e + 1];
        Complex acc{0.0, 0.0};
        quadrature::gauss3(rl, rr, [&](double r, double w) {
            const double t = (r - rl) * inv_h;
            const Complex bv = bl + (br - bl) * t;
            acc += w * r * r * p(r) * std::conj(bv);
        });
        sum += acc;
    }
    return four_pi * sum;
}

double norm_profile(const PiecewiseRadialProfile& p, const RadialGrid& grid) {
    double sum = 0.0;
    for (std::size_t e = 0; e + 1 < grid.nodes.size(); ++e) {
        double acc = 0.0;
        quadrature::gauss3(grid.nodes[e], grid.nodes[e + 1], [&](double r, double w) {
            const double v = p(r);
            acc += w * r * r * v * v;
        });
        sum += acc;
    }
    return std::sqrt(four_pi * sum);
}

} // namespace invsrc
