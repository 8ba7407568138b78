#pragma once

#include "invsrc/helmholtz_solver.hpp"
#include "invsrc/media_sources.hpp"
#include "invsrc/parallel.hpp"
#include "invsrc/radial_core.hpp"

#include <Eigen/Dense>

#include <string>

namespace invsrc {

// Per-frequency boundary measurement: trace of the radiated field at r = R
// and the frequency weight h(k).
struct Measurement {
    double k = 0.0;
    Complex trace;
    Complex h{1.0, 0.0};
};

struct MeasurementSet {
    std::vector<Measurement> entries;
    double R = 0.0;
    std::string provenance;
    double sigma_rel = 0.0;
    std::uint64_t seed = 0;

    std::vector<double> frequencies() const;
};

// Throws unless frequencies are strictly increasing and positive and every
// h_j is nonzero.
void validate_measurements(const MeasurementSet& ms);

// Normal-equation data: G[j][i] = <psi_i, psi_j>_{L^2(Omega)} (Hermitian,
// conjugate-linear second slot) and c_j = h_j^{-1} ||gamma u_j||^2_{L^2(Gamma)}.
struct GramSystem {
    Eigen::MatrixXcd gram;
    Eigen::VectorXcd rhs;
    double condition_estimate = 0.0;
};

struct RegSpec {
    enum class Kind { none, tikhonov, tsvd };
    Kind kind = Kind::none;
    double param = 0.0;
};

struct SolveDiagnostics {
    double condition = 0.0;
    int effective_rank = 0;
    bool tsvd_fallback = false;
    double residual = 0.0;
};

struct ReconstructionResult {
    Eigen::VectorXcd alphas;
    RadialField f_min;
    SolveDiagnostics solve;
    std::vector<double> constraint_residuals;
    double imag_ratio = 0.0;
};

// Dirichlet eigenpairs of -div(a grad psi) = lambda b psi on the ball,
// eigenfunctions normalized in L^2(Omega, b) with sign fixed positive near
// the origin. Eigenvalues strictly increasing.
struct EigenBasis {
    GridPtr grid;
    std::vector<double> lambdas;
    std::vector<RadialField> modes;

    std::size_t size() const { return lambdas.size(); }
};

GramSystem assemble_gram(std::span<const RadialField> adjoint_fields,
                         const MeasurementSet& measurements,
                         ExecPolicy exec = ExecPolicy::parallel);

// Plain Hermitian solve for reg none (automatic tsvd(1e-12) fallback on
// factorization failure), (G + lambda I) for tikhonov, spectral truncation
// for tsvd.
std::pair<Eigen::VectorXcd, SolveDiagnostics>
solve_normal_equations(const GramSystem& gs, const RegSpec& reg);

ReconstructionResult synthesize_min_norm(const Eigen::VectorXcd& alphas,
                                         std::span<const RadialField> adjoint_fields,
                                         const GramSystem& gs,
                                         ExecPolicy exec = ExecPolicy::parallel);

// ||f_true - Re f_min|| / ||f_true|| in L^2(Omega) by per-element quadrature
// on the evaluation grid.
double relative_error(const SourceSpec& f_true, const ReconstructionResult& estimate,
                      const GridPtr& grid);

// Smallest J eigenpairs of the generalized symmetric-definite pencil
// (a-stiffness, b-mass) with the boundary node removed. Inertia-count
// bisection brackets each eigenvalue; shifted inverse iteration recovers the
// eigenvector.
EigenBasis sturm_liouville_eigs(const MediumSpec& m, const GridPtr& grid, int J);

// Generalized Fourier reconstruction from traces measured at k_j =
// sqrt(lambda_j): alpha_j = h_j^{-1} <gamma u_j, dnu psi_j>_Gamma and
// f = b * sum alpha_j psi_j.
ReconstructionResult eigen_reconstruct(const MediumSpec& m, const EigenBasis& basis,
                                       const MeasurementSet& traces);

// One-sided second-order derivative of a mode at r = R (quadratic through the
// last three nodes).
double boundary_normal_derivative(const RadialField& mode);

} // namespace invsrc
