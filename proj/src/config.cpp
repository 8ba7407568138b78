#include "invsrc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace invsrc {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        parts.push_back(trim(item));
    }
    return parts;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" +
                                    value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" +
                                    value + "'");
    }
}

} // namespace

std::vector<double> parse_frequencies(const std::string& text) {
    std::vector<double> ks;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const long lo = parse_long("frequencies", trim(text.substr(0, dots)));
        const long hi = parse_long("frequencies", trim(text.substr(dots + 2)));
        if (lo < 1 || hi < lo) {
            throw std::invalid_argument("config key 'frequencies': bad range");
        }
        for (long j = lo; j <= hi; ++j) {
            ks.push_back(static_cast<double>(j));
        }
        return ks;
    }
    for (const auto& item : split(text, ',')) {
        if (!item.empty()) {
            ks.push_back(parse_double("frequencies", item));
        }
    }
    return ks;
}

void ExperimentConfig::validate() const {
    if (frequencies.empty()) {
        throw std::invalid_argument("config key 'frequencies': empty list");
    }
    double prev = 0.0;
    for (double k : frequencies) {
        if (!(k > prev)) {
            throw std::invalid_argument(
                "config key 'frequencies': must be strictly increasing and positive");
        }
        prev = k;
    }
    if (n_inverse < 3 || n_data < 3) {
        throw std::invalid_argument("config key 'grid.*': need at least 3 nodes");
    }
    if (n_data == n_inverse && !allow_inverse_crime) {
        throw std::invalid_argument(
            "config key 'grid.n_data': equals grid.n_inverse; pass "
            "--allow-inverse-crime to run the inverse crime deliberately");
    }
    if (sigma_rel < 0.0) {
        throw std::invalid_argument("config key 'noise.sigma_rel': must be >= 0");
    }
    if (medium_kind == MediumKind::custom) {
        if (medium_segments.empty()) {
            throw std::invalid_argument(
                "config key 'medium.segments': required for custom medium");
        }
        double prev_hi = 0.0;
        for (const auto& s : medium_segments) {
            if (!(s.r_lo >= prev_hi) || !(s.r_hi > s.r_lo) || !(s.r_hi < R)) {
                throw std::invalid_argument(
                    "config key 'medium.segments': segments must be ordered, "
                    "non-overlapping and end before R");
            }
            if (!(s.a > 0.0) || !(s.b > 0.0)) {
                throw std::invalid_argument(
                    "config key 'medium.segments': a and b must be positive");
            }
            prev_hi = s.r_hi;
        }
    }
    if (source_kind == SourceKind::poly) {
        if (poly_coeffs.empty()) {
            throw std::invalid_argument(
                "config key 'source.poly.coeffs': required for poly source");
        }
        if (!(poly_radius > 0.0) || !(poly_radius < R)) {
            throw std::invalid_argument(
                "config key 'source.poly.radius': must lie in (0, R)");
        }
    }
    if (reg.kind == RegSpec::Kind::tikhonov && reg.param < 0.0) {
        throw std::invalid_argument("config key 'reg.param': tikhonov needs >= 0");
    }
    if (reg.kind == RegSpec::Kind::tsvd &&
        (!(reg.param > 0.0) || !(reg.param < 1.0))) {
        throw std::invalid_argument("config key 'reg.param': tsvd needs (0, 1)");
    }
}

ExperimentConfig parse_config_text(const std::string& text,
                                   bool allow_inverse_crime) {
    ExperimentConfig cfg;
    cfg.allow_inverse_crime = allow_inverse_crime;
    cfg.frequencies = parse_frequencies("1..40");

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "medium.kind") {
            if (value == "paper") {
                cfg.medium_kind = MediumKind::paper;
            } else if (value == "homogeneous") {
                cfg.medium_kind = MediumKind::homogeneous;
            } else if (value == "custom") {
                cfg.medium_kind = MediumKind::custom;
            } else {
                throw std::invalid_argument("config key 'medium.kind': unknown '" +
                                            value + "'");
            }
        } else if (key == "medium.segments") {
            cfg.medium_segments.clear();
            for (const auto& seg : split(value, ',')) {
                const auto f = split(seg, ':');
                if (f.size() != 4) {
                    throw std::invalid_argument(
                        "config key 'medium.segments': expected r_lo:r_hi:a:b");
                }
                MediumSegment ms;
                ms.r_lo = parse_double(key, f[0]);
                ms.r_hi = parse_double(key, f[1]);
                ms.a = parse_double(key, f[2]);
                ms.b = parse_double(key, f[3]);
                cfg.medium_segments.push_back(ms);
            }
        } else if (key == "source.kind") {
            if (value == "f1") {
                cfg.source_kind = SourceKind::f1;
            } else if (value == "f2") {
                cfg.source_kind = SourceKind::f2;
            } else if (value == "poly") {
                cfg.source_kind = SourceKind::poly;
            } else {
                throw std::invalid_argument("config key 'source.kind': unknown '" +
                                            value + "'");
            }
        } else if (key == "source.poly.coeffs") {
            cfg.poly_coeffs.clear();
            for (const auto& c : split(value, ',')) {
                cfg.poly_coeffs.push_back(parse_double(key, c));
            }
        } else if (key == "source.poly.radius") {
            cfg.poly_radius = parse_double(key, value);
        } else if (key == "frequencies") {
            cfg.frequencies = parse_frequencies(value);
        } else if (key == "grid.n_inverse") {
            cfg.n_inverse = static_cast<int>(parse_long(key, value));
        } else if (key == "grid.n_data") {
            cfg.n_data = static_cast<int>(parse_long(key, value));
        } else if (key == "noise.sigma_rel") {
            cfg.sigma_rel = parse_double(key, value);
        } else if (key == "reg.kind") {
            if (value == "none") {
                cfg.reg.kind = RegSpec::Kind::none;
            } else if (value == "tikhonov") {
                cfg.reg.kind = RegSpec::Kind::tikhonov;
            } else if (value == "tsvd") {
                cfg.reg.kind = RegSpec::Kind::tsvd;
            } else {
                throw std::invalid_argument("config key 'reg.kind': unknown '" +
                                            value + "'");
            }
        } else if (key == "reg.param") {
            cfg.reg.param = parse_double(key, value);
        } else if (key == "output.dir") {
            cfg.output_dir = value;
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path, bool allow_inverse_crime) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config file not found: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), allow_inverse_crime);
}

MediumSpec make_medium(const ExperimentConfig& cfg) {
    switch (cfg.medium_kind) {
    case MediumKind::paper:
        return paper_medium();
    case MediumKind::homogeneous:
        return homogeneous_medium();
    case MediumKind::custom: {
        std::vector<ProfileSegment> a_segs, b_segs;
        double a0 = 1.0;
        for (const auto& s : cfg.medium_segments) {
            a_segs.push_back({s.r_lo, s.r_hi, {s.a}, 0.0, 0.0});
            b_segs.push_back({s.r_lo, s.r_hi, {s.b}, 0.0, 0.0});
            a0 = std::min(a0, s.a);
        }
        MediumSpec m;
        m.a = PiecewiseRadialProfile(std::move(a_segs), 1.0, cfg.R);
        m.b = PiecewiseRadialProfile(std::move(b_segs), 1.0, cfg.R);
        m.h_kind = HKind::constant_one;
        m.a0 = a0;
        return m;
    }
    }
    throw std::logic_error("make_medium: unknown medium kind");
}

SourceSpec make_source(const ExperimentConfig& cfg) {
    switch (cfg.source_kind) {
    case SourceKind::f1:
        return source_f1();
    case SourceKind::f2:
        return source_f2();
    case SourceKind::poly:
        return polynomial_source(RadialPolynomial(cfg.poly_coeffs, cfg.poly_radius));
    }
    throw std::logic_error("make_source: unknown source kind");
}

std::string medium_kind_name(MediumKind k) {
    switch (k) {
    case MediumKind::paper:
        return "paper";
    case MediumKind::homogeneous:
        return "homogeneous";
    case MediumKind::custom:
        return "custom";
    }
    return "?";
}

std::string source_kind_name(SourceKind k) {
    switch (k) {
    case SourceKind::f1:
        return "f1";
    case SourceKind::f2:
        return "f2";
    case SourceKind::poly:
        return "poly";
    }
    return "?";
}

std::string reg_kind_name(RegSpec::Kind k) {
    switch (k) {
    case RegSpec::Kind::none:
        return "none";
    case RegSpec::Kind::tikhonov:
        return "tikhonov";
    case RegSpec::Kind::tsvd:
        return "tsvd";
    }
    return "?";
}

} // namespace invsrc
