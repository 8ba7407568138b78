#include "invsrc/exporters.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace invsrc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string format_float(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

namespace {

void write_atomic(const std::string& dir, const std::string& name,
                  const std::string& content) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path final_path = fs::path(dir) / name;
    const fs::path tmp_path = fs::path(dir) / (".tmp-" + name);
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp_path.string());
        }
        out << content;
        if (!out) {
            throw std::runtime_error("write failed for " + tmp_path.string());
        }
    }
    fs::rename(tmp_path, final_path, ec);
    if (ec) {
        throw std::runtime_error("rename failed for " + final_path.string() + ": " +
                                 ec.message());
    }
}

std::string measurements_csv(const MeasurementSet& ms) {
    std::string out = "k,trace_re,trace_im,h_re,h_im\n";
    for (const auto& e : ms.entries) {
        out += format_float(e.k) + ',' + format_float(e.trace.real()) + ',' +
               format_float(e.trace.imag()) + ',' + format_float(e.h.real()) + ',' +
               format_float(e.h.imag()) + '\n';
    }
    return out;
}

std::string profile_csv(const NamedProfile& prof) {
    std::string out = "r,f_true,f_rec_re,f_rec_im\n";
    for (const auto& row : prof.rows) {
        out += format_float(row.r) + ',' + format_float(row.f_true) + ',' +
               format_float(row.f_rec.real()) + ',' + format_float(row.f_rec.imag()) +
               '\n';
    }
    return out;
}

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

// Minimal static line plot; everything formatted with fixed precision so the
// output is deterministic.
std::string svg_plot(const std::vector<Series>& series, const std::string& x_label,
                     const std::string& y_label, bool log_y) {
    constexpr int width = 800, height = 560;
    constexpr double ml = 70, mr = 20, mt = 20, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            double yy = log_y ? std::log10(std::max(y, 1e-300)) : y;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, yy);
            ymax = std::max(ymax, yy);
        }
    }
    if (!(xmax > xmin)) {
        xmax = xmin + 1.0;
    }
    if (!(ymax > ymin)) {
        ymax = ymin + 1.0;
    }
    const double xspan = xmax - xmin, yspan = ymax - ymin;
    const double x0 = xmin - 0.02 * xspan, x1 = xmax + 0.02 * xspan;
    const double y0 = ymin - 0.05 * yspan, y1 = ymax + 0.05 * yspan;
    auto px = [&](double x) {
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr);
    };
    auto py = [&](double y) {
        double yy = log_y ? std::log10(std::max(y, 1e-300)) : y;
        return height - mb - (yy - y0) / (y1 - y0) * (height - mt - mb);
    };
    char buf[256];
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"560\" "
           "viewBox=\"0 0 800 560\">\n";
    svg += "<rect width=\"800\" height=\"560\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                  "fill=\"none\" stroke=\"black\"/>\n",
                  ml, mt, width - ml - mr, height - mt - mb);
    svg += buf;
    for (int t = 0; t <= 5; ++t) {
        const double fx = x0 + (x1 - x0) * t / 5.0;
        const double fy_plot = y0 + (y1 - y0) * t / 5.0;
        const double fy = log_y ? std::pow(10.0, fy_plot) : fy_plot;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      px(fx), height - mb, px(fx), height - mb + 5.0);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                      "text-anchor=\"middle\">%.3g</text>\n",
                      px(fx), height - mb + 18.0, fx);
        svg += buf;
        const double ypix = height - mb - (fy_plot - y0) / (y1 - y0) * (height - mt - mb);
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"black\"/>\n",
                      ml - 5.0, ypix, ml, ypix);
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" "
                      "text-anchor=\"end\">%.3g</text>\n",
                      ml - 8.0, ypix + 4.0, fy);
        svg += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"14\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  ml + 0.5 * (width - ml - mr), height - 10.0, x_label.c_str());
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"15\" y=\"%.1f\" font-size=\"14\" text-anchor=\"middle\" "
                  "transform=\"rotate(-90 15 %.1f)\">%s</text>\n",
                  mt + 0.5 * (height - mt - mb), mt + 0.5 * (height - mt - mb),
                  y_label.c_str());
    svg += buf;
    double legend_y = mt + 16.0;
    for (const auto& s : series) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : s.points) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
            svg += buf;
        }
        svg += "\"/>\n";
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                      "stroke=\"%s\" stroke-width=\"2\"/>\n",
                      width - mr - 150.0, legend_y, width - mr - 120.0, legend_y,
                      s.color.c_str());
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n",
                      width - mr - 114.0, legend_y + 4.0, s.label.c_str());
        svg += buf;
        legend_y += 18.0;
    }
    svg += "</svg>\n";
    return svg;
}

ordered_json config_json(const ExperimentConfig& cfg) {
    ordered_json j;
    j["medium.kind"] = medium_kind_name(cfg.medium_kind);
    if (!cfg.medium_segments.empty()) {
        ordered_json segs = ordered_json::array();
        for (const auto& s : cfg.medium_segments) {
            segs.push_back({{"r_lo", s.r_lo}, {"r_hi", s.r_hi}, {"a", s.a}, {"b", s.b}});
        }
        j["medium.segments"] = segs;
    }
    j["source.kind"] = source_kind_name(cfg.source_kind);
    if (cfg.source_kind == SourceKind::poly) {
        j["source.poly.coeffs"] = cfg.poly_coeffs;
        j["source.poly.radius"] = cfg.poly_radius;
    }
    j["frequencies"] = cfg.frequencies;
    j["grid.n_inverse"] = cfg.n_inverse;
    j["grid.n_data"] = cfg.n_data;
    j["noise.sigma_rel"] = cfg.sigma_rel;
    j["reg.kind"] = reg_kind_name(cfg.reg.kind);
    j["reg.param"] = cfg.reg.param;
    j["seed"] = cfg.seed;
    // output.dir is deliberately not echoed: artifacts must not depend on
    // where they are written.
    j["allow_inverse_crime"] = cfg.allow_inverse_crime;
    j["R"] = cfg.R;
    return j;
}

} // namespace

void export_csv(const RunReport& report, const std::string& dir) {
    if (!report.measurements.entries.empty()) {
        write_atomic(dir, "measurements.csv", measurements_csv(report.measurements));
    }
    for (const auto& prof : report.profiles) {
        write_atomic(dir, prof.name + ".csv", profile_csv(prof));
    }
    if (!report.table1.empty()) {
        std::string out = "J,eps_f1,eps_f2\n";
        for (const auto& row : report.table1) {
            out += std::to_string(row.J) + ',' + format_float(row.eps_f1) + ',' +
                   format_float(row.eps_f2) + '\n';
        }
        write_atomic(dir, "table1.csv", out);
    }
    if (!report.eigen_rows.empty()) {
        std::string out = "j,lambda,k_j,alpha_re,alpha_im\n";
        for (const auto& row : report.eigen_rows) {
            out += std::to_string(row.j) + ',' + format_float(row.lambda) + ',' +
                   format_float(row.k) + ',' + format_float(row.alpha.real()) + ',' +
                   format_float(row.alpha.imag()) + '\n';
        }
        write_atomic(dir, "eigen.csv", out);
    }
    if (!report.adjoint_rows.empty()) {
        std::string out = "k,r,psi_re,psi_im\n";
        for (const auto& row : report.adjoint_rows) {
            out += format_float(row.k) + ',' + format_float(row.r) + ',' +
                   format_float(row.psi.real()) + ',' + format_float(row.psi.imag()) +
                   '\n';
        }
        write_atomic(dir, "adjoint.csv", out);
    }
}

void export_json(const RunReport& report, const std::string& dir) {
    ordered_json j;
    j["kind"] = report.kind;
    j["config"] = config_json(report.config);
    if (!report.measurements.provenance.empty()) {
        j["provenance"] = report.measurements.provenance;
    }
    ordered_json scalars;
    for (const auto& [name, value] : report.scalars) {
        scalars[name] = value;
    }
    j["scalars"] = scalars;
    j["diagnostics"] = {{"condition", report.solve.condition},
                        {"effective_rank", report.solve.effective_rank},
                        {"tsvd_fallback", report.solve.tsvd_fallback},
                        {"residual", report.solve.residual}};
    j["constraint_residuals"] = report.constraint_residuals;
    j["imag_ratio"] = report.imag_ratio;
    if (!report.per_j_errors.empty()) {
        j["per_j_errors"] = report.per_j_errors;
    }
    if (!report.table1.empty()) {
        ordered_json rows = ordered_json::array();
        for (const auto& row : report.table1) {
            rows.push_back({{"J", row.J}, {"eps_f1", row.eps_f1}, {"eps_f2", row.eps_f2}});
        }
        j["table1"] = rows;
    }
    write_atomic(dir, "summary.json", j.dump(2) + "\n");
}

void export_plot(const RunReport& report, const std::string& dir) {
    for (const auto& prof : report.profiles) {
        Series truth{"true", "#1f77b4", {}};
        Series rec{"reconstructed", "#d62728", {}};
        for (const auto& row : prof.rows) {
            truth.points.emplace_back(row.r, row.f_true);
            rec.points.emplace_back(row.r, row.f_rec.real());
        }
        write_atomic(dir, prof.name + ".svg",
                     svg_plot({truth, rec}, "r", "f(r)", false));
    }
    if (!report.table1.empty()) {
        Series e1{"eps_f1", "#1f77b4", {}};
        Series e2{"eps_f2", "#d62728", {}};
        for (const auto& row : report.table1) {
            e1.points.emplace_back(row.J, row.eps_f1);
            e2.points.emplace_back(row.J, row.eps_f2);
        }
        write_atomic(dir, "table1.svg",
                     svg_plot({e1, e2}, "J", "relative error", true));
    }
    if (!report.per_j_errors.empty()) {
        Series e{"eps", "#1f77b4", {}};
        for (std::size_t i = 0; i < report.per_j_errors.size(); ++i) {
            e.points.emplace_back(static_cast<double>(i + 1), report.per_j_errors[i]);
        }
        write_atomic(dir, "errors.svg",
                     svg_plot({e}, "J", "relative error", true));
    }
}

} // namespace invsrc
