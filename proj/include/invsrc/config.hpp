#pragma once

#include "invsrc/media_sources.hpp"
#include "invsrc/reconstruction.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace invsrc {

enum class MediumKind { paper, homogeneous, custom };
enum class SourceKind { f1, f2, poly };

// One custom-medium shell: coefficient values a, b on [r_lo, r_hi].
struct MediumSegment {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double a = 1.0;
    double b = 1.0;
};

struct ExperimentConfig {
    MediumKind medium_kind = MediumKind::paper;
    std::vector<MediumSegment> medium_segments;
    SourceKind source_kind = SourceKind::f1;
    std::vector<double> poly_coeffs;
    double poly_radius = 0.5;
    std::vector<double> frequencies; // strictly increasing, positive
    int n_inverse = 4096;
    int n_data = 8192;
    double sigma_rel = 0.0;
    std::uint64_t seed = 0;
    RegSpec reg;
    std::string output_dir = "out";
    bool allow_inverse_crime = false;
    double R = 2.0; // paper geometry, not configurable

    void validate() const;
};

// Flat key-value config ("key = value", '#' comments). Unknown keys and
// invariant violations are rejected with the offending key in the message.
// Keys: medium.kind, medium.segments, source.kind, source.poly.coeffs,
// source.poly.radius, frequencies, grid.n_inverse, grid.n_data,
// noise.sigma_rel, reg.kind, reg.param, output.dir. The inverse-crime guard
// (n_data != n_inverse) can only be lifted by the CLI flag, which callers
// pass through here.
ExperimentConfig load_config(const std::string& path,
                             bool allow_inverse_crime = false);
ExperimentConfig parse_config_text(const std::string& text,
                                   bool allow_inverse_crime = false);

// "1..J" or a comma-separated list.
std::vector<double> parse_frequencies(const std::string& text);

MediumSpec make_medium(const ExperimentConfig& cfg);
SourceSpec make_source(const ExperimentConfig& cfg);

std::string medium_kind_name(MediumKind k);
std::string source_kind_name(SourceKind k);
std::string reg_kind_name(RegSpec::Kind k);

} // namespace invsrc
