#pragma once

#include "invsrc/media_sources.hpp"
#include "invsrc/parallel.hpp"
#include "invsrc/radial_core.hpp"

#include <functional>

namespace invsrc {

enum class ProblemKind { direct, adjoint };

// Discrete radial weak form: tridiagonal complex matrix (the form
// integral(a u' v' - k^2 b u v) r^2 dr minus the DtN term R^2 Lambda u(R) v(R)
// in the last diagonal entry) plus a right-hand side filled by the solvers.
// The matrix is complex-symmetric for the direct kind; the adjoint kind
// differs only in the boundary entry (conjugated DtN multiplier).
struct AssembledSystem {
    GridPtr grid;
    double k = 0.0;
    ProblemKind kind = ProblemKind::direct;
    std::vector<Complex> lower;
    std::vector<Complex> diag;
    std::vector<Complex> upper;
    std::vector<Complex> rhs;
};

// Exterior DtN multiplier on the sphere of radius R: the outgoing radial mode
// e^{ikr}/r gives d_nu u = (ik - 1/R) u on Gamma.
Complex dtn_coefficient(double k, double R);

// L^2(Gamma) adjoint of the scalar multiplier: its complex conjugate.
Complex adjoint_dtn_coefficient(double k, double R);

// Linear FEM assembly of the radial weak form with natural condition at
// r = 0. All medium breakpoints must be grid nodes.
AssembledSystem assemble(const MediumSpec& m, double k, const GridPtr& grid,
                         ProblemKind kind);

// Direct problem: load h(k) * integral f phi_i r^2 dr, tridiagonal solve with
// partial pivoting. The discrete residual is checked against 1e-12 relative.
RadialField solve_direct(const MediumSpec& m, const SourceSpec& f, double k,
                         const GridPtr& grid);

// Adjoint problem with constant boundary datum eta: load R^2 eta at the
// boundary node only.
RadialField solve_adjoint(const MediumSpec& m, Complex eta, double k,
                          const GridPtr& grid);

// Independent closed forms for the homogeneous medium (a = b = h = 1).
// Direct trace: e^{ikR}/(kR) * integral_0^supp f(s) sin(ks) s ds, the radial
// 1-D integral evaluated by adaptive Gauss-Kronrod quadrature to 1e-12.
Complex oracle_homogeneous_direct_trace(const SourceSpec& f, double k, double R);

// Adjoint field: eta R e^{-ikR} sin(kr)/(kr), with the removable value at
// r = 0.
Complex oracle_homogeneous_adjoint(Complex eta, double k, double R, double r);

// Relative residual of h<f, psi>_Omega = <gamma u, eta>_Gamma with u, psi the
// discrete solutions on the given grid. The volume pairing uses the same
// per-element quadrature as the load vector.
double check_variational_identity(const MediumSpec& m, const SourceSpec& f,
                                  Complex eta, double k, const GridPtr& grid);

// Batched solves over frequencies; the per-frequency axis is the intended
// parallelization. Serial mode is the bit-identical reference.
std::vector<RadialField> solve_direct_batch(const MediumSpec& m, const SourceSpec& f,
                                            std::span<const double> ks,
                                            const GridPtr& grid,
                                            ExecPolicy exec = ExecPolicy::parallel);
std::vector<RadialField> solve_adjoint_batch(const MediumSpec& m,
                                             std::span<const Complex> etas,
                                             std::span<const double> ks,
                                             const GridPtr& grid,
                                             ExecPolicy exec = ExecPolicy::parallel);

// Adaptive Gauss-Kronrod (G7/K15) integration of a real integrand.
double integrate_adaptive(const std::function<double(double)>& fn, double a,
                          double b, double tol);

// Grid with all coefficient and source breakpoints of (m, f) snapped in.
GridPtr grid_for(const MediumSpec& m, const SourceSpec& f, double R, std::size_t n);
GridPtr grid_for_medium(const MediumSpec& m, double R, std::size_t n);

} // namespace invsrc
