#include "invsrc/helmholtz_solver.hpp"

#include "invsrc/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace invsrc {

namespace {

constexpr double residual_tolerance = 1e-12;

struct ElementMatrices {
    // Symmetric real tridiagonals: stiffness (a-weighted) and mass
    // (b-weighted), both with the r^2 volume weight.
    std::vector<double> k_diag, k_off;
    std::vector<double> m_diag, m_off;
};

ElementMatrices element_matrices(const MediumSpec& m, const RadialGrid& grid) {
    const std::size_t n = grid.size();
    ElementMatrices em;
    em.k_diag.assign(n, 0.0);
    em.k_off.assign(n - 1, 0.0);
    em.m_diag.assign(n, 0.0);
    em.m_off.assign(n - 1, 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double rl = grid.nodes[e], rr = grid.nodes[e + 1];
        const double h = rr - rl;
        const double inv_h = 1.0 / h;
        double k00 = 0, k01 = 0, k11 = 0;
        double m00 = 0, m01 = 0, m11 = 0;
        quadrature::gauss3(rl, rr, [&](double r, double w) {
            const double t = (r - rl) * inv_h;
            const double p0 = 1.0 - t, p1 = t;
            const double wr2 = w * r * r;
            const double ka = wr2 * m.a(r) * inv_h * inv_h;
            k00 += ka;
            k01 -= ka;
            k11 += ka;
            const double mb = wr2 * m.b(r);
            m00 += mb * p0 * p0;
            m01 += mb * p0 * p1;
            m11 += mb * p1 * p1;
        });
        em.k_diag[e] += k00;
        em.k_diag[e + 1] += k11;
        em.k_off[e] += k01;
        em.m_diag[e] += m00;
        em.m_diag[e + 1] += m11;
        em.m_off[e] += m01;
    }
    return em;
}

void require_breakpoints_on_grid(const MediumSpec& m, const RadialGrid& grid) {
    const double tol = 1e-12 * grid.R;
    auto on_grid = [&](double r) {
        auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), r - tol);
        return it != grid.nodes.end() && std::abs(*it - r) <= tol;
    };
    for (const auto* prof : {&m.a, &m.b}) {
        for (double knot : prof->interior_knots(grid.R)) {
            if (!on_grid(knot)) {
                throw std::invalid_argument(
                    "assemble: coefficient breakpoint not on grid");
            }
        }
    }
}

AssembledSystem assemble_from(const ElementMatrices& em, double k,
                              const GridPtr& grid, ProblemKind kind) {
    const std::size_t n = grid->size();
    AssembledSystem sys;
    sys.grid = grid;
    sys.k = k;
    sys.kind = kind;
    sys.diag.assign(n, Complex{});
    sys.lower.assign(n - 1, Complex{});
    sys.upper.assign(n - 1, Complex{});
    sys.rhs.assign(n, Complex{});
    const double k2 = k * k;
    for (std::size_t i = 0; i < n; ++i) {
        sys.diag[i] = Complex{em.k_diag[i] - k2 * em.m_diag[i], 0.0};
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Complex off{em.k_off[i] - k2 * em.m_off[i], 0.0};
        sys.lower[i] = off;
        sys.upper[i] = off;
    }
    const double R = grid->R;
    const Complex lambda = (kind == ProblemKind::direct)
                               ? dtn_coefficient(k, R)
                               : adjoint_dtn_coefficient(k, R);
    sys.diag[n - 1] -= R * R * lambda;
    return sys;
}

// integral f(r) phi_i(r) r^2 dr per basis function, no h factor.
std::vector<Complex> load_vector(const PiecewiseRadialProfile& f,
                                 const RadialGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<Complex> load(n, Complex{});
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double rl = grid.nodes[e], rr = grid.nodes[e + 1];
        const double inv_h = 1.0 / (rr - rl);
        double l0 = 0, l1 = 0;
        quadrature::gauss3(rl, rr, [&](double r, double w) {
            const double t = (r - rl) * inv_h;
            const double fw = w * r * r * f(r);
            l0 += fw * (1.0 - t);
            l1 += fw * t;
        });
        load[e] += l0;
        load[e + 1] += l1;
    }
    return load;
}

RadialField solve_system(AssembledSystem sys) {
    auto sol = solve_tridiagonal<Complex>(sys.lower, sys.diag, sys.upper, sys.rhs);

    // Backward-error check of the computed solution.
    auto ax = tridiagonal_apply<Complex>(sys.lower, sys.diag, sys.upper, sol.x);
    double num = 0.0, nb = 0.0, nx = 0.0, na = 0.0;
    for (std::size_t i = 0; i < sys.rhs.size(); ++i) {
        num += std::norm(ax[i] - sys.rhs[i]);
        nb += std::norm(sys.rhs[i]);
        nx += std::norm(sol.x[i]);
        double row = std::abs(sys.diag[i]);
        if (i > 0) row += std::abs(sys.lower[i - 1]);
        if (i + 1 < sys.rhs.size()) row += std::abs(sys.upper[i]);
        na = std::max(na, row);
    }
    const double denom = std::sqrt(nb) + na * std::sqrt(nx);
    const double rel = denom > 0.0 ? std::sqrt(num) / denom : 0.0;
    if (!(rel <= residual_tolerance)) {
        throw std::runtime_error(
            "helmholtz solve: residual " + std::to_string(rel) +
            " exceeds tolerance, smallest pivot " + std::to_string(sol.min_pivot));
    }

    RadialField field;
    field.grid = sys.grid;
    field.k = sys.k;
    field.values = std::move(sol.x);
    return field;
}

} // namespace

Complex dtn_coefficient(double k, double R) {
    if (!(k > 0.0) || !(R > 0.0)) {
        throw std::invalid_argument("dtn_coefficient: k and R must be positive");
    }
    return Complex{-1.0 / R, k};
}

Complex adjoint_dtn_coefficient(double k, double R) {
    return std::conj(dtn_coefficient(k, R));
}

AssembledSystem assemble(const MediumSpec& m, double k, const GridPtr& grid,
                         ProblemKind kind) {
    if (!grid) {
        throw std::invalid_argument("assemble: null grid");
    }
    if (!(k > 0.0)) {
        throw std::invalid_argument("assemble: k must be positive");
    }
    require_breakpoints_on_grid(m, *grid);
    return assemble_from(element_matrices(m, *grid), k, grid, kind);
}

RadialField solve_direct(const MediumSpec& m, const SourceSpec& f, double k,
                         const GridPtr& grid) {
    if (!(f.support_radius < grid->R)) {
        throw std::invalid_argument("solve_direct: source must be supported inside the ball");
    }
    AssembledSystem sys = assemble(m, k, grid, ProblemKind::direct);
    const Complex h = h_eval(m, k);
    auto load = load_vector(f.f, *grid);
    for (std::size_t i = 0; i < load.size(); ++i) {
        sys.rhs[i] = h * load[i];
    }
    return solve_system(std::move(sys));
}

RadialField solve_adjoint(const MediumSpec& m, Complex eta, double k,
                          const GridPtr& grid) {
    AssembledSystem sys = assemble(m, k, grid, ProblemKind::adjoint);
    sys.rhs.back() = grid->R * grid->R * eta;
    return solve_system(std::move(sys));
}

namespace {

struct GaussKronrod {
    // QUADPACK G7/K15 nodes and weights on [-1, 1].
    static constexpr double xk[8] = {
        0.0,
        0.2077849550078985,
        0.4058451513773972,
        0.5860872354676911,
        0.7415311855993944,
        0.8648644233597691,
        0.9491079123427585,
        0.9914553711208126,
    };
    static constexpr double wk[8] = {
        0.2094821410847278,
        0.2044329400752989,
        0.1903505780647854,
        0.1690047266392679,
        0.1406532597155259,
        0.1047900103222502,
        0.0630920926299785,
        0.0229353220105292,
    };
    static constexpr double wg[4] = {
        0.4179591836734694,
        0.3818300505051189,
        0.2797053914892767,
        0.1294849661688697,
    };
};

void adaptive_gk(const std::function<double(double)>& fn, double a, double b,
                 double tol, int depth, double& acc) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kron = GaussKronrod::wk[0] * fn(mid);
    double gauss = GaussKronrod::wg[0] * fn(mid);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * GaussKronrod::xk[i];
        const double fsum = fn(mid - dx) + fn(mid + dx);
        kron += GaussKronrod::wk[i] * fsum;
        if (i % 2 == 0) {
            gauss += GaussKronrod::wg[i / 2] * fsum;
        }
    }
    kron *= half;
    gauss *= half;
    const double err = std::abs(kron - gauss);
    if (err <= tol || depth >= 48) {
        acc += kron;
        return;
    }
    adaptive_gk(fn, a, mid, 0.5 * tol, depth + 1, acc);
    adaptive_gk(fn, mid, b, 0.5 * tol, depth + 1, acc);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& fn, double a,
                          double b, double tol) {
    if (!(b > a)) {
        return 0.0;
    }
    double acc = 0.0;
    adaptive_gk(fn, a, b, tol, 0, acc);
    return acc;
}

Complex oracle_homogeneous_direct_trace(const SourceSpec& f, double k, double R) {
    if (!(k > 0.0) || !(R > 0.0)) {
        throw std::invalid_argument("oracle: k and R must be positive");
    }
    // Split the radial integral at profile knots so every panel is smooth.
    std::vector<double> cuts{0.0};
    for (double knot : f.f.interior_knots(f.support_radius)) {
        cuts.push_back(knot);
    }
    cuts.push_back(f.support_radius);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        integral += integrate_adaptive(
            [&](double s) { return f.f(s) * std::sin(k * s) * s; }, cuts[i],
            cuts[i + 1], 1e-14);
    }
    const Complex phase = std::polar(1.0, k * R);
    return phase / (k * R) * integral;
}

Complex oracle_homogeneous_adjoint(Complex eta, double k, double R, double r) {
    if (!(k > 0.0) || !(R > 0.0) || r < 0.0 || r > R) {
        throw std::invalid_argument("oracle: bad arguments");
    }
    const Complex amp = eta * R * std::polar(1.0, -k * R);
    if (r == 0.0) {
        return amp;
    }
    return amp * std::sin(k * r) / (k * r);
}

double check_variational_identity(const MediumSpec& m, const SourceSpec& f,
                                  Complex eta, double k, const GridPtr& grid) {
    const RadialField u = solve_direct(m, f, k, grid);
    const RadialField psi = solve_adjoint(m, eta, k, grid);
    const Complex lhs = h_eval(m, k) * pair_profile_field(f.f, psi);
    const Complex rhs = boundary_inner_product(u.trace(), eta, grid->R);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale == 0.0) {
        return 0.0;
    }
    return std::abs(lhs - rhs) / scale;
}

std::vector<RadialField> solve_direct_batch(const MediumSpec& m, const SourceSpec& f,
                                            std::span<const double> ks,
                                            const GridPtr& grid, ExecPolicy exec) {
    if (!(f.support_radius < grid->R)) {
        throw std::invalid_argument("solve_direct_batch: source must be supported inside the ball");
    }
    require_breakpoints_on_grid(m, *grid);
    const ElementMatrices em = element_matrices(m, *grid);
    const auto load = load_vector(f.f, *grid);
    std::vector<RadialField> out(ks.size());
    std::exception_ptr failure;

    const auto solve_one = [&](std::size_t j) {
        AssembledSystem sys =
            assemble_from(em, ks[j], grid, ProblemKind::direct);
        const Complex h = h_eval(m, ks[j]);
        for (std::size_t i = 0; i < load.size(); ++i) {
            sys.rhs[i] = h * load[i];
        }
        out[j] = solve_system(std::move(sys));
    };

    const auto solve_labelled = [&](std::size_t j) {
        try {
            solve_one(j);
        } catch (const std::exception& e) {
            throw std::runtime_error("k=" + std::to_string(ks[j]) + ": " + e.what());
        }
    };
    if (exec == ExecPolicy::serial) {
        for (std::size_t j = 0; j < ks.size(); ++j) {
            solve_labelled(j);
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (long long j = 0; j < static_cast<long long>(ks.size()); ++j) {
            try {
                solve_labelled(static_cast<std::size_t>(j));
            } catch (...) {
#pragma omp critical
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return out;
}

std::vector<RadialField> solve_adjoint_batch(const MediumSpec& m,
                                             std::span<const Complex> etas,
                                             std::span<const double> ks,
                                             const GridPtr& grid, ExecPolicy exec) {
    if (etas.size() != ks.size()) {
        throw std::invalid_argument("solve_adjoint_batch: size mismatch");
    }
    require_breakpoints_on_grid(m, *grid);
    const ElementMatrices em = element_matrices(m, *grid);
    std::vector<RadialField> out(ks.size());
    std::exception_ptr failure;

    const auto solve_one = [&](std::size_t j) {
        AssembledSystem sys =
            assemble_from(em, ks[j], grid, ProblemKind::adjoint);
        sys.rhs.back() = grid->R * grid->R * etas[j];
        out[j] = solve_system(std::move(sys));
    };

    const auto solve_labelled = [&](std::size_t j) {
        try {
            solve_one(j);
        } catch (const std::exception& e) {
            throw std::runtime_error("k=" + std::to_string(ks[j]) + ": " + e.what());
        }
    };
    if (exec == ExecPolicy::serial) {
        for (std::size_t j = 0; j < ks.size(); ++j) {
            solve_labelled(j);
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (long long j = 0; j < static_cast<long long>(ks.size()); ++j) {
            try {
                solve_labelled(static_cast<std::size_t>(j));
            } catch (...) {
#pragma omp critical
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return out;
}

GridPtr grid_for(const MediumSpec& m, const SourceSpec& f, double R, std::size_t n) {
    std::vector<double> bp;
    for (const auto* prof : {&m.a, &m.b, &f.f}) {
        for (double knot : prof->interior_knots(R)) {
            bp.push_back(knot);
        }
    }
    if (f.support_radius > 0.0 && f.support_radius < R) {
        bp.push_back(f.support_radius);
    }
    return build_grid(R, n, std::move(bp));
}

GridPtr grid_for_medium(const MediumSpec& m, double R, std::size_t n) {
    std::vector<double> bp;
    for (const auto* prof : {&m.a, &m.b}) {
        for (double knot : prof->interior_knots(R)) {
            bp.push_back(knot);
        }
    }
    return build_grid(R, n, std::move(bp));
}

} // namespace invsrc
