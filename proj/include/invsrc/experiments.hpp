#pragma once

#include "invsrc/config.hpp"
#include "invsrc/reconstruction.hpp"

#include <string>
#include <utility>
#include <vector>

namespace invsrc {

struct ProfileRow {
    double r = 0.0;
    double f_true = 0.0;
    Complex f_rec;
};

struct NamedProfile {
    std::string name; // file stem, e.g. "reconstruction"
    std::vector<ProfileRow> rows;
};

struct Table1Row {
    int J = 0;
    double eps_f1 = 0.0;
    double eps_f2 = 0.0;
};

struct EigenRow {
    int j = 0;
    double lambda = 0.0;
    double k = 0.0;
    Complex alpha;
};

struct AdjointRow {
    double k = 0.0;
    double r = 0.0;
    Complex psi;
};

// Everything a run produces. Exporters pick the populated parts; timings are
// reported on stdout only so identical configs give byte-identical artifacts.
struct RunReport {
    std::string kind;
    ExperimentConfig config;
    MeasurementSet measurements;
    std::vector<NamedProfile> profiles;
    std::vector<Table1Row> table1;
    std::vector<EigenRow> eigen_rows;
    std::vector<AdjointRow> adjoint_rows;
    std::vector<std::pair<std::string, double>> scalars;
    std::vector<double> per_j_errors;
    SolveDiagnostics solve;
    std::vector<double> constraint_residuals;
    double imag_ratio = 0.0;
    std::vector<std::pair<std::string, double>> timings_ms;
};

// Direct solves on the n_data grid at every configured frequency, plus
// optional relative complex Gaussian noise (seeded, drawn in frequency
// order).
MeasurementSet generate_synthetic_data(const ExperimentConfig& cfg,
                                       ExecPolicy exec = ExecPolicy::parallel);

RunReport run_forward(const ExperimentConfig& cfg,
                      ExecPolicy exec = ExecPolicy::parallel);
RunReport run_adjoint(const ExperimentConfig& cfg,
                      ExecPolicy exec = ExecPolicy::parallel);
RunReport run_reconstruction(const ExperimentConfig& cfg,
                             ExecPolicy exec = ExecPolicy::parallel);
RunReport run_table1(const ExperimentConfig& cfg,
                     ExecPolicy exec = ExecPolicy::parallel);
RunReport run_nonradiating_demo(const ExperimentConfig& cfg,
                                ExecPolicy exec = ExecPolicy::parallel);
RunReport run_eigen_experiment(const ExperimentConfig& cfg,
                               ExecPolicy exec = ExecPolicy::parallel);

// Aborts with the stage label if any value in the pipeline went non-finite.
void ensure_finite(double value, const std::string& stage);
void ensure_finite(Complex value, const std::string& stage);

} // namespace invsrc
