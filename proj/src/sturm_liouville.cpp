#include "invsrc/reconstruction.hpp"
#include "invsrc/tridiagonal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace invsrc {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

// Real symmetric tridiagonal pencil (K, M) on the interior DOFs (last node
// removed by the Dirichlet condition; the origin keeps its natural DOF).
struct Pencil {
    std::vector<double> k_diag, k_off;
    std::vector<double> m_diag, m_off;
    std::size_t size() const { return k_diag.size(); }
};

Pencil assemble_pencil(const MediumSpec& m, const RadialGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> kd(n, 0.0), ko(n - 1, 0.0), md(n, 0.0), mo(n - 1, 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double rl = grid.nodes[e], rr = grid.nodes[e + 1];
        const double inv_h = 1.0 / (rr - rl);
        double k00 = 0, k01 = 0, k11 = 0, m00 = 0, m01 = 0, m11 = 0;
        quadrature::gauss3(rl, rr, [&](double r, double w) {
            const double t = (r - rl) * inv_h;
            const double wr2 = w * r * r;
            const double ka = wr2 * m.a(r) * inv_h * inv_h;
            k00 += ka;
            k01 -= ka;
            k11 += ka;
            const double mb = wr2 * m.b(r);
            m00 += mb * (1.0 - t) * (1.0 - t);
            m01 += mb * (1.0 - t) * t;
            m11 += mb * t * t;
        });
        kd[e] += k00;
        kd[e + 1] += k11;
        ko[e] += k01;
        md[e] += m00;
        md[e + 1] += m11;
        mo[e] += m01;
    }
    Pencil p;
    // Drop the boundary DOF (psi(R) = 0).
    p.k_diag.assign(kd.begin(), kd.end() - 1);
    p.k_off.assign(ko.begin(), ko.end() - 1);
    p.m_diag.assign(md.begin(), md.end() - 1);
    p.m_off.assign(mo.begin(), mo.end() - 1);
    return p;
}

// Number of pencil eigenvalues below sigma: negative pivots of the LDL^T
// factorization of K - sigma*M (Sylvester inertia).
int eigenvalue_count_below(const Pencil& p, double sigma) {
    constexpr double pivmin = 1e-290;
    const std::size_t n = p.size();
    int count = 0;
    double d = p.k_diag[0] - sigma * p.m_diag[0];
    if (std::abs(d) < pivmin) {
        d = -pivmin;
    }
    if (d < 0.0) {
        ++count;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double off = p.k_off[i - 1] - sigma * p.m_off[i - 1];
        double di = p.k_diag[i] - sigma * p.m_diag[i] - off * off / d;
        if (std::abs(di) < pivmin) {
            di = -pivmin;
        }
        if (di < 0.0) {
            ++count;
        }
        d = di;
    }
    return count;
}

double m_inner(const Pencil& p, std::span<const double> x, std::span<const double> y) {
    const std::size_t n = p.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double my = p.m_diag[i] * y[i];
        if (i > 0) {
            my += p.m_off[i - 1] * y[i - 1];
        }
        if (i + 1 < n) {
            my += p.m_off[i] * y[i + 1];
        }
        acc += x[i] * my;
    }
    return acc;
}

} // namespace

EigenBasis sturm_liouville_eigs(const MediumSpec& m, const GridPtr& grid, int J) {
    if (!grid) {
        throw std::invalid_argument("sturm_liouville_eigs: null grid");
    }
    if (J < 1) {
        throw std::invalid_argument("sturm_liouville_eigs: J must be at least 1");
    }
    const std::size_t n = grid->size();
    if (static_cast<std::size_t>(J) >= n - 1) {
        throw std::invalid_argument("sturm_liouville_eigs: J exceeds interior DOFs");
    }

    // Resolution guard: at least 20 nodes per wavelength of the highest mode,
    // with the local wavenumber estimated as J*pi/R * sqrt(b_max / a_min).
    double a_min = std::numeric_limits<double>::infinity(), b_max = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double r = grid->R * static_cast<double>(i) / 10000.0;
        a_min = std::min(a_min, m.a(r));
        b_max = std::max(b_max, m.b(r));
    }
    const double k_est = static_cast<double>(J) * std::numbers::pi / grid->R *
                         std::sqrt(b_max / a_min);
    double h_max = 0.0;
    for (std::size_t e = 0; e + 1 < n; ++e) {
        h_max = std::max(h_max, grid->nodes[e + 1] - grid->nodes[e]);
    }
    if (2.0 * std::numbers::pi / k_est < 20.0 * h_max) {
        throw std::invalid_argument(
            "sturm_liouville_eigs: grid too coarse for the requested mode count");
    }

    const Pencil pencil = assemble_pencil(m, *grid);
    const std::size_t nd = pencil.size();

    // Upper bound for the J-th eigenvalue by doubling.
    double hi = k_est * k_est + 1.0;
    while (eigenvalue_count_below(pencil, hi) < J) {
        hi *= 2.0;
        if (!std::isfinite(hi)) {
            throw std::runtime_error("sturm_liouville_eigs: bound search failed");
        }
    }

    EigenBasis basis;
    basis.grid = grid;
    basis.lambdas.reserve(static_cast<std::size_t>(J));
    basis.modes.reserve(static_cast<std::size_t>(J));

    std::vector<std::vector<double>> previous; // M-orthonormal interior vectors

    for (int j = 1; j <= J; ++j) {
        // Bisect until the bracket [lo, up] isolates eigenvalue j tightly.
        double lo = 0.0, up = hi;
        while (up - lo > 1e-12 * std::max(1.0, up)) {
            const double mid = 0.5 * (lo + up);
            if (eigenvalue_count_below(pencil, mid) >= j) {
                up = mid;
            } else {
                lo = mid;
            }
        }
        const double lambda_bisect = 0.5 * (lo + up);

        // Shifted inverse iteration; the shift sits a hair below the
        // eigenvalue so K - sigma*M is safely factorizable.
        const double sigma = lo - 1e-9 * std::max(1.0, lo);
        std::vector<double> shift_diag(nd), shift_off(nd - 1);
        for (std::size_t i = 0; i < nd; ++i) {
            shift_diag[i] = pencil.k_diag[i] - sigma * pencil.m_diag[i];
        }
        for (std::size_t i = 0; i + 1 < nd; ++i) {
            shift_off[i] = pencil.k_off[i] - sigma * pencil.m_off[i];
        }

        std::vector<double> x(nd);
        for (std::size_t i = 0; i < nd; ++i) {
            x[i] = std::sin(static_cast<double>(j) * std::numbers::pi *
                            grid->nodes[i] / grid->R) +
                   1e-3;
        }
        for (int it = 0; it < 4; ++it) {
            // rhs = M x
            std::vector<double> rhs(nd);
            for (std::size_t i = 0; i < nd; ++i) {
                double acc = pencil.m_diag[i] * x[i];
                if (i > 0) {
                    acc += pencil.m_off[i - 1] * x[i - 1];
                }
                if (i + 1 < nd) {
                    acc += pencil.m_off[i] * x[i + 1];
                }
                rhs[i] = acc;
            }
            auto sol = solve_tridiagonal<double>(shift_off, shift_diag, shift_off, rhs);
            x = std::move(sol.x);
            for (const auto& prev : previous) {
                const double proj = m_inner(pencil, prev, x);
                for (std::size_t i = 0; i < nd; ++i) {
                    x[i] -= proj * prev[i];
                }
            }
            const double nrm = std::sqrt(m_inner(pencil, x, x));
            if (!(nrm > 0.0)) {
                throw std::runtime_error("sturm_liouville_eigs: iteration collapsed");
            }
            for (auto& v : x) {
                v /= nrm;
            }
        }

        // Rayleigh quotient (x is M-normalized).
        double rq = 0.0;
        for (std::size_t i = 0; i < nd; ++i) {
            double kx = pencil.k_diag[i] * x[i];
            if (i > 0) {
                kx += pencil.k_off[i - 1] * x[i - 1];
            }
            if (i + 1 < nd) {
                kx += pencil.k_off[i] * x[i + 1];
            }
            rq += x[i] * kx;
        }
        const double lambda =
            std::abs(rq - lambda_bisect) < 1e-6 * std::max(1.0, lambda_bisect)
                ? rq
                : lambda_bisect;

        if (!basis.lambdas.empty() && !(lambda > basis.lambdas.back())) {
            throw std::runtime_error(
                "sturm_liouville_eigs: eigenvalues not strictly increasing");
        }

        previous.push_back(x);

        // Module convention: unit norm in L^2(Omega, b) including the 4*pi
        // angular factor; sign positive near the origin.
        const double scale =
            (x[0] >= 0.0 ? 1.0 : -1.0) / std::sqrt(four_pi);
        RadialField mode;
        mode.grid = grid;
        mode.k = std::sqrt(lambda);
        mode.values.assign(n, Complex{});
        for (std::size_t i = 0; i < nd; ++i) {
            mode.values[i] = Complex{scale * x[i], 0.0};
        }
        mode.values[n - 1] = Complex{0.0, 0.0};

        basis.lambdas.push_back(lambda);
        basis.modes.push_back(std::move(mode));
    }
    return basis;
}

} // namespace invsrc
