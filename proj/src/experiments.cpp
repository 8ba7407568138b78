#include "invsrc/experiments.hpp"

#include "invsrc/helmholtz_solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace invsrc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string data_provenance(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "grid(n=" << cfg.n_data << ",R=" << cfg.R << ");sigma=" << cfg.sigma_rel
       << ";seed=" << cfg.seed;
    return os.str();
}

// Adjoint fields for the projection method: solve once with eta = 1 per
// frequency and scale by the measured trace (linearity), per the data choice
// eta_j = gamma u_j.
std::vector<RadialField> scaled_adjoint_fields(const MediumSpec& medium,
                                               const MeasurementSet& data,
                                               const GridPtr& grid,
                                               ExecPolicy exec) {
    const std::vector<double> ks = data.frequencies();
    const std::vector<Complex> ones(ks.size(), Complex{1.0, 0.0});
    std::vector<RadialField> fields =
        solve_adjoint_batch(medium, ones, ks, grid, exec);
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const Complex scale = data.entries[j].trace;
        for (auto& v : fields[j].values) {
            v *= scale;
        }
    }
    return fields;
}

NamedProfile sample_profile(const std::string& name, const SourceSpec& f_true,
                            const RadialField& f_rec) {
    NamedProfile prof;
    prof.name = name;
    const auto& nodes = f_rec.grid->nodes;
    prof.rows.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        prof.rows.push_back({nodes[i], f_true.f(nodes[i]), f_rec.values[i]});
    }
    return prof;
}

} // namespace

void ensure_finite(double value, const std::string& stage) {
    if (!std::isfinite(value)) {
        throw std::runtime_error("non-finite value at stage: " + stage);
    }
}

void ensure_finite(Complex value, const std::string& stage) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw std::runtime_error("non-finite value at stage: " + stage);
    }
}

MeasurementSet generate_synthetic_data(const ExperimentConfig& cfg, ExecPolicy exec) {
    cfg.validate();
    const MediumSpec medium = make_medium(cfg);
    const SourceSpec source = make_source(cfg);
    const GridPtr grid =
        grid_for(medium, source, cfg.R, static_cast<std::size_t>(cfg.n_data));

    std::vector<RadialField> fields;
    try {
        fields = solve_direct_batch(medium, source, cfg.frequencies, grid, exec);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("synthetic data: forward solve failed: ") +
                                 e.what());
    }

    MeasurementSet ms;
    ms.R = cfg.R;
    ms.sigma_rel = cfg.sigma_rel;
    ms.seed = cfg.seed;
    ms.provenance = data_provenance(cfg);
    ms.entries.reserve(fields.size());

    // Noise is drawn serially in frequency order so a seed fixes the data set
    // regardless of solver parallelism.
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < fields.size(); ++j) {
        Complex trace = fields[j].trace();
        ensure_finite(trace, "synthetic trace k=" + std::to_string(cfg.frequencies[j]));
        if (cfg.sigma_rel > 0.0) {
            const double s = cfg.sigma_rel * std::abs(trace);
            trace += Complex{s * normal(rng), s * normal(rng)};
        }
        ms.entries.push_back(
            {cfg.frequencies[j], trace, h_eval(medium, cfg.frequencies[j])});
    }
    return ms;
}

RunReport run_forward(const ExperimentConfig& cfg, ExecPolicy exec) {
    RunReport report;
    report.kind = "forward";
    report.config = cfg;
    const auto t0 = Clock::now();
    report.measurements = generate_synthetic_data(cfg, exec);
    report.timings_ms.emplace_back("forward_solves", ms_since(t0));
    return report;
}

RunReport run_adjoint(const ExperimentConfig& cfg, ExecPolicy exec) {
    cfg.validate();
    RunReport report;
    report.kind = "adjoint";
    report.config = cfg;
    const MediumSpec medium = make_medium(cfg);
    const GridPtr grid =
        grid_for_medium(medium, cfg.R, static_cast<std::size_t>(cfg.n_inverse));
    const auto t0 = Clock::now();
    const std::vector<Complex> ones(cfg.frequencies.size(), Complex{1.0, 0.0});
    const auto fields =
        solve_adjoint_batch(medium, ones, cfg.frequencies, grid, exec);
    report.timings_ms.emplace_back("adjoint_solves", ms_since(t0));
    for (std::size_t j = 0; j < fields.size(); ++j) {
        for (std::size_t i = 0; i < grid->size(); ++i) {
            report.adjoint_rows.push_back(
                {cfg.frequencies[j], grid->nodes[i], fields[j].values[i]});
        }
    }
    return report;
}

RunReport run_reconstruction(const ExperimentConfig& cfg, ExecPolicy exec) {
    cfg.validate();
    RunReport report;
    report.kind = "reconstruct";
    report.config = cfg;

    const MediumSpec medium = make_medium(cfg);
    const SourceSpec source = make_source(cfg);

    auto t0 = Clock::now();
    report.measurements = generate_synthetic_data(cfg, exec);
    report.timings_ms.emplace_back("data", ms_since(t0));

    const GridPtr grid =
        grid_for(medium, source, cfg.R, static_cast<std::size_t>(cfg.n_inverse));

    t0 = Clock::now();
    const auto fields = scaled_adjoint_fields(medium, report.measurements, grid, exec);
    report.timings_ms.emplace_back("adjoint_solves", ms_since(t0));

    t0 = Clock::now();
    const GramSystem gs = assemble_gram(fields, report.measurements, exec);
    report.timings_ms.emplace_back("gram", ms_since(t0));

    t0 = Clock::now();
    auto [alpha, diag] = solve_normal_equations(gs, cfg.reg);
    ReconstructionResult rec = synthesize_min_norm(alpha, fields, gs, exec);
    rec.solve = diag;
    report.timings_ms.emplace_back("normal_equations", ms_since(t0));

    const double eps = relative_error(source, rec, grid);
    ensure_finite(eps, "relative error");
    report.scalars.emplace_back("epsilon", eps);
    report.scalars.emplace_back("condition", diag.condition);
    report.solve = diag;
    report.constraint_residuals = rec.constraint_residuals;
    report.imag_ratio = rec.imag_ratio;
    report.profiles.push_back(sample_profile("reconstruction", source, rec.f_min));
    return report;
}

RunReport run_table1(const ExperimentConfig& cfg, ExecPolicy exec) {
    cfg.validate();
    RunReport report;
    report.kind = "table1";
    report.config = cfg;

    const std::vector<int> j_values{10, 20, 30, 40, 50, 60};
    const int j_max = j_values.back();

    ExperimentConfig base = cfg;
    base.frequencies = parse_frequencies("1.." + std::to_string(j_max));

    std::vector<std::vector<double>> eps_by_source;
    for (SourceKind sk : {SourceKind::f1, SourceKind::f2}) {
        ExperimentConfig run_cfg = base;
        run_cfg.source_kind = sk;
        const MediumSpec medium = make_medium(run_cfg);
        const SourceSpec source = make_source(run_cfg);

        auto t0 = Clock::now();
        const MeasurementSet data = generate_synthetic_data(run_cfg, exec);
        report.timings_ms.emplace_back("data_" + source_kind_name(sk), ms_since(t0));

        const GridPtr grid = grid_for(medium, source, run_cfg.R,
                                      static_cast<std::size_t>(run_cfg.n_inverse));
        t0 = Clock::now();
        const auto fields = scaled_adjoint_fields(medium, data, grid, exec);
        const GramSystem gs_full = assemble_gram(fields, data, exec);
        report.timings_ms.emplace_back("gram_" + source_kind_name(sk), ms_since(t0));

        t0 = Clock::now();
        std::vector<double> eps_list;
        for (int J : j_values) {
            GramSystem gs;
            gs.gram = gs_full.gram.topLeftCorner(J, J);
            gs.rhs = gs_full.rhs.head(J);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
                gs.gram, Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues().cwiseAbs().minCoeff();
            const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
            gs.condition_estimate =
                lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();

            auto [alpha, diag] = solve_normal_equations(gs, run_cfg.reg);
            const std::span<const RadialField> head(fields.data(),
                                                    static_cast<std::size_t>(J));
            ReconstructionResult rec = synthesize_min_norm(alpha, head, gs, exec);
            rec.solve = diag;
            const double eps = relative_error(source, rec, grid);
            ensure_finite(eps, "table1 J=" + std::to_string(J));
            eps_list.push_back(eps);

            if (J == 40) {
                report.profiles.push_back(sample_profile(
                    "reconstruction_" + source_kind_name(sk) + "_J40", source,
                    rec.f_min));
                report.scalars.emplace_back("condition_J40_" + source_kind_name(sk),
                                            diag.condition);
            }
        }
        report.timings_ms.emplace_back("inversions_" + source_kind_name(sk),
                                       ms_since(t0));
        eps_by_source.push_back(std::move(eps_list));
    }

    for (std::size_t i = 0; i < j_values.size(); ++i) {
        report.table1.push_back({j_values[i], eps_by_source[0][i], eps_by_source[1][i]});
    }
    return report;
}

RunReport run_nonradiating_demo(const ExperimentConfig& cfg, ExecPolicy exec) {
    cfg.validate();
    if (cfg.frequencies.size() != 3) {
        throw std::invalid_argument(
            "nonradiating demo: exactly three frequencies (k1, k2, k3) required");
    }
    const double k1 = cfg.frequencies[0];
    const double k2 = cfg.frequencies[1];

    RunReport report;
    report.kind = "nonrad";
    report.config = cfg;

    // The two-factor construction needs constant coefficients.
    const MediumSpec medium = homogeneous_medium();
    const RadialPolynomial w = nonradiating_bump(0.25 * cfg.R);
    const SourceSpec g = make_nonradiating(w, k1, k2);

    const GridPtr grid =
        grid_for(medium, g, cfg.R, static_cast<std::size_t>(cfg.n_data));
    const auto t0 = Clock::now();
    const auto fields = solve_direct_batch(medium, g, cfg.frequencies, grid, exec);
    report.timings_ms.emplace_back("forward_solves", ms_since(t0));

    MeasurementSet ms;
    ms.R = cfg.R;
    ms.provenance = data_provenance(cfg);
    for (std::size_t j = 0; j < fields.size(); ++j) {
        ms.entries.push_back(
            {cfg.frequencies[j], fields[j].trace(), h_eval(medium, cfg.frequencies[j])});
    }
    report.measurements = ms;

    const double t1 = std::abs(fields[0].trace());
    const double t2 = std::abs(fields[1].trace());
    const double t3 = std::abs(fields[2].trace());
    ensure_finite(t1, "nonrad trace k1");
    ensure_finite(t2, "nonrad trace k2");
    ensure_finite(t3, "nonrad trace k3");
    const double suppressed = std::max(t1, t2);
    const double ratio =
        suppressed > 0.0 ? t3 / suppressed : std::numeric_limits<double>::infinity();
    const double g_norm = norm_profile(g.f, *grid);

    report.scalars.emplace_back("trace_k1", t1);
    report.scalars.emplace_back("trace_k2", t2);
    report.scalars.emplace_back("trace_k3", t3);
    report.scalars.emplace_back("suppression_ratio", ratio);
    report.scalars.emplace_back("g_norm", g_norm);
    return report;
}

RunReport run_eigen_experiment(const ExperimentConfig& cfg, ExecPolicy exec) {
    cfg.validate();
    RunReport report;
    report.kind = "eigen";
    report.config = cfg;

    const int J = static_cast<int>(cfg.frequencies.size());
    const MediumSpec medium = make_medium(cfg);
    const SourceSpec source = make_source(cfg);

    const GridPtr grid_inv =
        grid_for(medium, source, cfg.R, static_cast<std::size_t>(cfg.n_inverse));

    auto t0 = Clock::now();
    const EigenBasis basis = sturm_liouville_eigs(medium, grid_inv, J);
    report.timings_ms.emplace_back("eigensolve", ms_since(t0));

    std::vector<double> ks(basis.lambdas.size());
    for (std::size_t j = 0; j < ks.size(); ++j) {
        ks[j] = std::sqrt(basis.lambdas[j]);
        ensure_finite(ks[j], "eigen frequency j=" + std::to_string(j + 1));
    }

    const GridPtr grid_data =
        grid_for(medium, source, cfg.R, static_cast<std::size_t>(cfg.n_data));
    t0 = Clock::now();
    const auto fields = solve_direct_batch(medium, source, ks, grid_data, exec);
    report.timings_ms.emplace_back("forward_solves", ms_since(t0));

    MeasurementSet traces;
    traces.R = cfg.R;
    traces.provenance = data_provenance(cfg);
    for (std::size_t j = 0; j < ks.size(); ++j) {
        traces.entries.push_back({ks[j], fields[j].trace(), h_eval(medium, ks[j])});
    }
    report.measurements = traces;

    t0 = Clock::now();
    const ReconstructionResult rec = eigen_reconstruct(medium, basis, traces);
    report.timings_ms.emplace_back("eigen_reconstruct", ms_since(t0));

    for (int j = 0; j < J; ++j) {
        report.eigen_rows.push_back({j + 1, basis.lambdas[static_cast<std::size_t>(j)],
                                     ks[static_cast<std::size_t>(j)],
                                     rec.alphas(j)});
    }

    // Prefix errors: the expansion truncated after the first J' modes.
    t0 = Clock::now();
    RadialField partial;
    partial.grid = grid_inv;
    partial.k = ks.front();
    partial.values.assign(grid_inv->size(), Complex{});
    report.per_j_errors.reserve(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        const auto& mode = basis.modes[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < partial.values.size(); ++i) {
            partial.values[i] += rec.alphas(j) * mode.values[i];
        }
        ReconstructionResult prefix;
        prefix.f_min = partial;
        for (std::size_t i = 0; i < prefix.f_min.values.size(); ++i) {
            prefix.f_min.values[i] *= medium.b(grid_inv->nodes[i]);
        }
        const double eps = relative_error(source, prefix, grid_inv);
        ensure_finite(eps, "eigen prefix error J=" + std::to_string(j + 1));
        report.per_j_errors.push_back(eps);
    }
    report.timings_ms.emplace_back("prefix_errors", ms_since(t0));

    report.scalars.emplace_back("epsilon", report.per_j_errors.back());
    report.imag_ratio = rec.imag_ratio;
    report.profiles.push_back(sample_profile("reconstruction", source, rec.f_min));
    return report;
}

} // namespace invsrc
