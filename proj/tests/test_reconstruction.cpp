#include "invsrc/reconstruction.hpp"

#include "invsrc/experiments.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace invsrc;

namespace {

constexpr double pi = std::numbers::pi;

// Pipeline fixture: adjoint fields with eta_j = gamma u_j on the inversion
// grid, measurements from a finer data grid.
struct Pipeline {
    MediumSpec medium;
    SourceSpec source;
    GridPtr grid;
    MeasurementSet data;
    std::vector<RadialField> fields;
};

Pipeline make_pipeline(MediumKind mk, SourceKind sk, int J, int n_data, int n_inv) {
    ExperimentConfig cfg;
    cfg.medium_kind = mk;
    cfg.source_kind = sk;
    cfg.n_data = n_data;
    cfg.n_inverse = n_inv;
    for (int j = 1; j <= J; ++j) {
        cfg.frequencies.push_back(j);
    }
    Pipeline p;
    p.medium = make_medium(cfg);
    p.source = make_source(cfg);
    p.data = generate_synthetic_data(cfg);
    p.grid = grid_for(p.medium, p.source, cfg.R, n_inv);
    const std::vector<Complex> ones(cfg.frequencies.size(), Complex{1.0, 0.0});
    p.fields = solve_adjoint_batch(p.medium, ones, cfg.frequencies, p.grid);
    for (std::size_t j = 0; j < p.fields.size(); ++j) {
        for (auto& v : p.fields[j].values) {
            v *= p.data.entries[j].trace;
        }
    }
    return p;
}

} // namespace

TEST_CASE("measurement validation") {
    MeasurementSet ms;
    ms.R = 2.0;
    ms.entries = {{1.0, {1.0, 0.0}, {1.0, 0.0}}, {2.0, {1.0, 0.0}, {1.0, 0.0}}};
    CHECK_NOTHROW(validate_measurements(ms));

    ms.entries[1].k = 1.0; // duplicate
    CHECK_THROWS_AS(validate_measurements(ms), std::invalid_argument);
    ms.entries[1].k = 0.5; // decreasing
    CHECK_THROWS_AS(validate_measurements(ms), std::invalid_argument);
    ms.entries[1].k = 2.0;
    ms.entries[1].h = {0.0, 0.0};
    CHECK_THROWS_AS(validate_measurements(ms), std::invalid_argument);
}

TEST_CASE("gram matrix: J = 1 closed form on the homogeneous medium") {
    auto p = make_pipeline(MediumKind::homogeneous, SourceKind::f1, 1, 2049, 1025);
    const auto gs = assemble_gram(p.fields, p.data);

    // psi_1 = t * R e^{-ikR} sin(kr)/(kr), k = 1, R = 2:
    // G11 = |t|^2 * 4*pi*R^2 * int_0^2 sin(r)^2 dr.
    const double t2 = std::norm(p.data.entries[0].trace);
    const double expected = t2 * 16.0 * pi * (1.0 - std::sin(4.0) / 4.0);
    CHECK(gs.gram(0, 0).real() == doctest::Approx(expected).epsilon(1e-4));
    CHECK(gs.gram(0, 0).imag() == doctest::Approx(0.0));

    // c_1 = h^{-1} * 4*pi*R^2 |t|^2
    CHECK(gs.rhs(0).real() == doctest::Approx(16.0 * pi * t2).epsilon(1e-12));
}

TEST_CASE("gram matrix is Hermitian with a real positive diagonal") {
    auto p = make_pipeline(MediumKind::paper, SourceKind::f2, 6, 1025, 513);
    const auto gs = assemble_gram(p.fields, p.data);
    for (int i = 0; i < 6; ++i) {
        REQUIRE(gs.gram(i, i).imag() == 0.0);
        REQUIRE(gs.gram(i, i).real() > 0.0);
        for (int j = 0; j < 6; ++j) {
            REQUIRE(gs.gram(i, j) == std::conj(gs.gram(j, i)));
        }
    }
    CHECK(gs.condition_estimate >= 1.0);

    SUBCASE("serial and parallel assembly are bit-identical") {
        const auto ser = assemble_gram(p.fields, p.data, ExecPolicy::serial);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                REQUIRE(ser.gram(i, j) == gs.gram(i, j));
            }
        }
    }

    SUBCASE("length mismatch is rejected") {
        std::vector<RadialField> short_fields(p.fields.begin(), p.fields.end() - 1);
        CHECK_THROWS_AS(assemble_gram(short_fields, p.data), std::invalid_argument);
    }
}

TEST_CASE("near-duplicate frequency blows up the condition estimate") {
    auto p = make_pipeline(MediumKind::homogeneous, SourceKind::f1, 4, 1025, 513);
    // Append a measurement at k_4 + 1e-13: numerically the same adjoint field.
    MeasurementSet dup = p.data;
    Measurement last = dup.entries.back();
    last.k += 1e-13;
    dup.entries.push_back(last);
    auto fields = p.fields;
    fields.push_back(fields.back());
    const auto gs = assemble_gram(fields, dup);
    CHECK(gs.condition_estimate > 1e12);
}

TEST_CASE("normal equations: scalar and identity cases") {
    GramSystem gs;
    gs.gram = Eigen::MatrixXcd::Zero(1, 1);
    gs.gram(0, 0) = Complex{4.0, 0.0};
    gs.rhs = Eigen::VectorXcd::Zero(1);
    gs.rhs(0) = Complex{2.0, 2.0};
    gs.condition_estimate = 1.0;
    auto [alpha, diag] = solve_normal_equations(gs, {});
    CHECK(std::abs(alpha(0) - Complex{0.5, 0.5}) <= 1e-14);
    CHECK(diag.effective_rank == 1);
    CHECK_FALSE(diag.tsvd_fallback);

    GramSystem eye;
    eye.gram = Eigen::MatrixXcd::Identity(3, 3);
    eye.rhs = Eigen::VectorXcd::Zero(3);
    eye.rhs << Complex{1.0, 0.0}, Complex{0.0, -2.0}, Complex{3.0, 1.0};
    eye.condition_estimate = 1.0;
    auto [a2, d2] = solve_normal_equations(eye, {});
    for (int i = 0; i < 3; ++i) {
        REQUIRE(std::abs(a2(i) - eye.rhs(i)) <= 1e-14);
    }
}

TEST_CASE("normal equations: J = 1 chain against the homogeneous closed forms") {
    auto p = make_pipeline(MediumKind::homogeneous, SourceKind::f1, 1, 2049, 1025);
    const auto gs = assemble_gram(p.fields, p.data);
    auto [alpha, diag] = solve_normal_equations(gs, {});

    const double t2 = std::norm(p.data.entries[0].trace);
    const double norm_psi_sq = t2 * 16.0 * pi * (1.0 - std::sin(4.0) / 4.0);
    const Complex expected = 16.0 * pi * t2 / norm_psi_sq;
    CHECK(std::abs(alpha(0) - expected) <= 1e-3 * std::abs(expected));

    SUBCASE("f_min is proportional to sin(r)/r") {
        auto rec = synthesize_min_norm(alpha, p.fields, gs);
        const auto& nodes = p.grid->nodes;
        // Compare against the analytic direction at two radii.
        std::size_t i1 = p.grid->size() / 3, i2 = 2 * p.grid->size() / 3;
        const double s1 = std::sin(nodes[i1]) / nodes[i1];
        const double s2 = std::sin(nodes[i2]) / nodes[i2];
        const Complex ratio_field = rec.f_min.values[i1] / rec.f_min.values[i2];
        CHECK(std::abs(ratio_field - s1 / s2) <= 1e-3 * std::abs(s1 / s2));
    }
}

TEST_CASE("regularization parameter validation") {
    GramSystem gs;
    gs.gram = Eigen::MatrixXcd::Identity(2, 2);
    gs.rhs = Eigen::VectorXcd::Ones(2);
    gs.condition_estimate = 1.0;
    CHECK_THROWS_AS(solve_normal_equations(gs, {RegSpec::Kind::tikhonov, -1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_normal_equations(gs, {RegSpec::Kind::tsvd, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_normal_equations(gs, {RegSpec::Kind::tsvd, 1.5}),
                    std::invalid_argument);

    SUBCASE("tikhonov shifts the diagonal") {
        auto [alpha, diag] = solve_normal_equations(gs, {RegSpec::Kind::tikhonov, 1.0});
        for (int i = 0; i < 2; ++i) {
            REQUIRE(std::abs(alpha(i) - Complex{0.5, 0.0}) <= 1e-14);
        }
    }
    SUBCASE("tsvd zeroes directions below the cut") {
        GramSystem tiny;
        tiny.gram = Eigen::MatrixXcd::Zero(2, 2);
        tiny.gram(0, 0) = 1.0;
        tiny.gram(1, 1) = 1e-9;
        tiny.rhs = Eigen::VectorXcd::Ones(2);
        tiny.condition_estimate = 1e9;
        auto [alpha, diag] = solve_normal_equations(tiny, {RegSpec::Kind::tsvd, 1e-6});
        CHECK(std::abs(alpha(0) - Complex{1.0, 0.0}) <= 1e-14);
        CHECK(alpha(1) == Complex{0.0, 0.0});
        CHECK(diag.effective_rank == 1);
    }
}

TEST_CASE("synthesize_min_norm: zero coefficients and joint permutation") {
    auto p = make_pipeline(MediumKind::homogeneous, SourceKind::f2, 5, 1025, 513);
    const auto gs = assemble_gram(p.fields, p.data);

    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(5);
    auto rec0 = synthesize_min_norm(zero, p.fields, gs);
    for (const auto& v : rec0.f_min.values) {
        REQUIRE(v == Complex{0.0, 0.0});
    }

    std::mt19937_64 rng(13);
    std::normal_distribution<double> normal;
    Eigen::VectorXcd alpha(5);
    for (int i = 0; i < 5; ++i) {
        alpha(i) = Complex{normal(rng), normal(rng)};
    }
    auto rec = synthesize_min_norm(alpha, p.fields, gs);

    // Reverse the (alpha_i, psi_i) pairs jointly.
    std::vector<RadialField> rev(p.fields.rbegin(), p.fields.rend());
    Eigen::VectorXcd alpha_rev = alpha.reverse();
    auto rec_rev = synthesize_min_norm(alpha_rev, rev, gs);
    double scale = 0.0;
    for (const auto& v : rec.f_min.values) {
        scale = std::max(scale, std::abs(v));
    }
    for (std::size_t i = 0; i < rec.f_min.values.size(); ++i) {
        REQUIRE(std::abs(rec.f_min.values[i] - rec_rev.f_min.values[i]) <=
                1e-13 * scale);
    }

    SUBCASE("serial equals parallel bitwise") {
        auto ser = synthesize_min_norm(alpha, p.fields, gs, ExecPolicy::serial);
        for (std::size_t i = 0; i < rec.f_min.values.size(); ++i) {
            REQUIRE(ser.f_min.values[i] == rec.f_min.values[i]);
        }
    }
}

TEST_CASE("relative_error: exact match, null estimate, rejection") {
    const MediumSpec m = homogeneous_medium();
    // Continuous piecewise-linear source: its nodal interpolant is exact.
    const auto ramp = polynomial_source(RadialPolynomial({0.5, -1.0}, 0.5));
    const auto grid = grid_for(m, ramp, 2.0, 257);

    ReconstructionResult exact;
    exact.f_min.grid = grid;
    exact.f_min.k = 1.0;
    exact.f_min.values.resize(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        exact.f_min.values[i] = ramp.f(grid->nodes[i]);
    }
    CHECK(relative_error(ramp, exact, grid) <= 1e-13);

    ReconstructionResult null;
    null.f_min.grid = grid;
    null.f_min.k = 1.0;
    null.f_min.values.assign(grid->size(), Complex{0.0, 0.0});
    CHECK(relative_error(source_f1(), null, grid) == doctest::Approx(1.0));

    const auto zero_src = polynomial_source(RadialPolynomial({0.0}, 0.5));
    CHECK_THROWS_AS(relative_error(zero_src, null, grid), std::invalid_argument);
}

TEST_CASE("minimum-norm projection: constraints, orthogonality, minimality") {
    // Volumetric constraints c_j = <f_true, psi_j> with eta = 1 fields keep
    // the system consistent; the solve must then be exact.
    const MediumSpec medium = paper_medium();
    const SourceSpec source = source_f2();
    const auto grid = grid_for(medium, source, 2.0, 1025);
    const int J = 10;
    std::vector<double> ks;
    for (int j = 1; j <= J; ++j) {
        ks.push_back(j);
    }
    const std::vector<Complex> ones(ks.size(), Complex{1.0, 0.0});
    const auto fields = solve_adjoint_batch(medium, ones, ks, grid);

    MeasurementSet ms;
    ms.R = 2.0;
    for (int j = 0; j < J; ++j) {
        ms.entries.push_back({ks[j], Complex{0.0, 0.0}, Complex{1.0, 0.0}});
    }
    auto gs = assemble_gram(fields, ms);
    for (int j = 0; j < J; ++j) {
        gs.rhs(j) = pair_profile_field(source.f, fields[j]);
    }

    auto [alpha, diag] = solve_normal_equations(gs, {});
    CHECK_FALSE(diag.tsvd_fallback);
    auto rec = synthesize_min_norm(alpha, fields, gs);

    for (double r : rec.constraint_residuals) {
        REQUIRE(r <= 1e-8);
    }

    // (f_true - f_min) is orthogonal to every adjoint field.
    const double err_norm =
        relative_error(source, rec, grid) * norm_profile(source.f, *grid);
    for (int j = 0; j < J; ++j) {
        const Complex lhs = pair_profile_field(source.f, fields[j]) -
                            inner_product_volume(rec.f_min, fields[j]);
        const double rel = std::abs(lhs) / (err_norm * norm_volume(fields[j]));
        REQUIRE(rel <= 1e-8);
    }

    // Any feasible point has norm >= ||f_min||: sample perturbations in the
    // constraint null space.
    const double fmin_norm = norm_volume(rec.f_min);
    std::mt19937_64 rng(41);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        RadialField v = make_field(grid, 1.0);
        for (auto& val : v.values) {
            val = Complex{normal(rng), normal(rng)};
        }
        // Project out the span components so constraints stay satisfied.
        Eigen::VectorXcd overlap(J);
        for (int j = 0; j < J; ++j) {
            overlap(j) = inner_product_volume(v, fields[j]);
        }
        const Eigen::VectorXcd beta = gs.gram.ldlt().solve(overlap);
        for (int j = 0; j < J; ++j) {
            for (std::size_t i = 0; i < v.values.size(); ++i) {
                v.values[i] -= beta(j) * fields[j].values[i];
            }
        }
        RadialField g = rec.f_min;
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            g.values[i] += v.values[i];
        }
        REQUIRE(norm_volume(g) >= fmin_norm * (1.0 - 1e-10));
    }
}

TEST_CASE("gram positive definiteness at small J on the paper medium") {
    auto p = make_pipeline(MediumKind::paper, SourceKind::f1, 10, 2049, 1025);
    const auto gs = assemble_gram(p.fields, p.data);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gs.gram,
                                                       Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("sturm-liouville eigenpairs on the homogeneous ball") {
    const MediumSpec m = homogeneous_medium();
    const auto grid = grid_for_medium(m, 2.0, 2049);
    const auto basis = sturm_liouville_eigs(m, grid, 10);

    for (int j = 1; j <= 10; ++j) {
        const double exact = std::pow(j * pi / 2.0, 2);
        REQUIRE(std::abs(basis.lambdas[j - 1] - exact) <= 1e-4 * exact);
    }
    CHECK(basis.lambdas[0] == doctest::Approx(2.4674).epsilon(1e-4));
    CHECK(basis.lambdas[1] == doctest::Approx(9.8696).epsilon(1e-4));

    SUBCASE("eigenfunctions are proportional to sin(j pi r / 2)/r") {
        const auto& mode = basis.modes[1]; // j = 2
        const double c = mode.values[0].real() / pi; // value at r=0 is c*k
        for (std::size_t i = 1; i < grid->size(); i += 97) {
            const double r = grid->nodes[i];
            const double expected = c * std::sin(pi * r) / r;
            REQUIRE(mode.values[i].real() == doctest::Approx(expected).epsilon(1e-3));
        }
    }

    SUBCASE("boundary value is exactly zero and sign is positive at the origin") {
        for (const auto& mode : basis.modes) {
            REQUIRE(mode.values.back() == Complex{0.0, 0.0});
            REQUIRE(mode.values.front().real() > 0.0);
        }
    }
}

TEST_CASE("sturm-liouville orthonormality and discrete residual") {
    for (MediumKind mk : {MediumKind::homogeneous, MediumKind::paper}) {
        ExperimentConfig cfg;
        cfg.medium_kind = mk;
        cfg.frequencies = {1.0};
        const MediumSpec m = make_medium(cfg);
        const auto grid = grid_for_medium(m, 2.0, 1025);
        const int J = 8;
        const auto basis = sturm_liouville_eigs(m, grid, J);

        for (int i = 0; i < J; ++i) {
            for (int j = i; j < J; ++j) {
                const Complex ip =
                    inner_product_volume_weighted(basis.modes[i], basis.modes[j], m.b);
                const double expected = (i == j) ? 1.0 : 0.0;
                REQUIRE(std::abs(ip.real() - expected) <= 1e-8);
                REQUIRE(std::abs(ip.imag()) <= 1e-12);
            }
        }

        // Discrete residual ||K psi - lambda M psi|| / lambda: rebuild the
        // pencil with the same quadrature, independently of the solver.
        const std::size_t n = grid->size();
        std::vector<double> kd(n, 0.0), ko(n - 1, 0.0), md(n, 0.0), mo(n - 1, 0.0);
        for (std::size_t e = 0; e + 1 < n; ++e) {
            const double rl = grid->nodes[e], rr = grid->nodes[e + 1];
            const double inv_h = 1.0 / (rr - rl);
            quadrature::gauss3(rl, rr, [&](double r, double w) {
                const double t = (r - rl) * inv_h;
                const double wr2 = w * r * r;
                kd[e] += wr2 * m.a(r) * inv_h * inv_h;
                kd[e + 1] += wr2 * m.a(r) * inv_h * inv_h;
                ko[e] -= wr2 * m.a(r) * inv_h * inv_h;
                md[e] += wr2 * m.b(r) * (1 - t) * (1 - t);
                md[e + 1] += wr2 * m.b(r) * t * t;
                mo[e] += wr2 * m.b(r) * (1 - t) * t;
            });
        }
        for (int j = 0; j < J; ++j) {
            const double lambda = basis.lambdas[j];
            const auto& v = basis.modes[j].values;
            double res2 = 0.0, mnorm2 = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) { // interior rows only
                double kx = kd[i] * v[i].real();
                double mx = md[i] * v[i].real();
                if (i > 0) {
                    kx += ko[i - 1] * v[i - 1].real();
                    mx += mo[i - 1] * v[i - 1].real();
                }
                if (i + 2 < n) { // neighbor i+1 is interior
                    kx += ko[i] * v[i + 1].real();
                    mx += mo[i] * v[i + 1].real();
                } else {
                    kx += ko[i] * v[i + 1].real(); // boundary value is zero anyway
                    mx += mo[i] * v[i + 1].real();
                }
                res2 += (kx - lambda * mx) * (kx - lambda * mx);
                mnorm2 += mx * mx;
            }
            REQUIRE(std::sqrt(res2) / lambda <= 1e-10);
        }
    }
}

TEST_CASE("sturm-liouville input validation") {
    const MediumSpec m = homogeneous_medium();
    const auto tiny = grid_for_medium(m, 2.0, 9);
    CHECK_THROWS_AS(sturm_liouville_eigs(m, tiny, 0), std::invalid_argument);
    CHECK_THROWS_AS(sturm_liouville_eigs(m, tiny, 8), std::invalid_argument);
    // 9 nodes cannot resolve 5 modes at 20 nodes per wavelength.
    CHECK_THROWS_AS(sturm_liouville_eigs(m, tiny, 5), std::invalid_argument);
}

TEST_CASE("eigen_reconstruct: zero data, frequency mismatch, coefficient identity") {
    const MediumSpec m = homogeneous_medium();
    const SourceSpec f2 = source_f2();
    const auto grid = grid_for(m, f2, 2.0, 1025);
    const int J = 8;
    const auto basis = sturm_liouville_eigs(m, grid, J);

    MeasurementSet traces;
    traces.R = 2.0;
    for (int j = 0; j < J; ++j) {
        traces.entries.push_back(
            {std::sqrt(basis.lambdas[j]), Complex{0.0, 0.0}, Complex{1.0, 0.0}});
    }

    SUBCASE("zero traces give the zero reconstruction") {
        const auto rec = eigen_reconstruct(m, basis, traces);
        for (const auto& v : rec.f_min.values) {
            REQUIRE(v == Complex{0.0, 0.0});
        }
    }

    SUBCASE("mismatched frequency is rejected") {
        traces.entries[3].k += 1e-6;
        CHECK_THROWS_AS(eigen_reconstruct(m, basis, traces), std::invalid_argument);
    }

    SUBCASE("boundary-data coefficients match volumetric ones") {
        // O(h^2) in both the traces and the normal derivative: needs the
        // production grids to sit below 1e-4.
        const auto fine = grid_for(m, f2, 2.0, 2049);
        const auto fine_basis = sturm_liouville_eigs(m, fine, J);
        const auto data_grid = grid_for(m, f2, 2.0, 4097);
        std::vector<double> ks;
        for (int j = 0; j < J; ++j) {
            ks.push_back(std::sqrt(fine_basis.lambdas[j]));
        }
        const auto fields = solve_direct_batch(m, f2, ks, data_grid);
        MeasurementSet fine_traces;
        fine_traces.R = 2.0;
        for (int j = 0; j < J; ++j) {
            fine_traces.entries.push_back(
                {ks[j], fields[j].trace(), Complex{1.0, 0.0}});
        }
        const auto rec = eigen_reconstruct(m, fine_basis, fine_traces);
        double max_diff = 0.0, max_vol = 0.0;
        for (int j = 0; j < J; ++j) {
            const Complex vol = pair_profile_field(f2.f, fine_basis.modes[j]);
            max_diff = std::max(max_diff, std::abs(rec.alphas(j) - vol));
            max_vol = std::max(max_vol, std::abs(vol));
        }
        CHECK(max_diff <= 1e-4 * max_vol);
    }
}

TEST_CASE("eigen and projection reconstructions agree within a factor two") {
    // Homogeneous medium, frequencies at sqrt(lambda_j), J = 20.
    const MediumSpec m = homogeneous_medium();
    const SourceSpec f2 = source_f2();
    const int J = 20;
    const auto grid = grid_for(m, f2, 2.0, 1025);
    const auto basis = sturm_liouville_eigs(m, grid, J);

    std::vector<double> ks;
    for (int j = 0; j < J; ++j) {
        ks.push_back(std::sqrt(basis.lambdas[j]));
    }

    ExperimentConfig cfg;
    cfg.medium_kind = MediumKind::homogeneous;
    cfg.source_kind = SourceKind::f2;
    cfg.frequencies = ks;
    cfg.n_data = 2049;
    cfg.n_inverse = 1025;
    const auto proj_report = run_reconstruction(cfg);
    double eps_proj = 0.0;
    for (const auto& [name, value] : proj_report.scalars) {
        if (name == "epsilon") {
            eps_proj = value;
        }
    }

    const auto eigen_report = run_eigen_experiment(cfg);
    const double eps_eigen = eigen_report.per_j_errors.back();

    CHECK(eps_proj <= 2.0 * eps_eigen);
    CHECK(eps_eigen <= 2.0 * eps_proj);
}
