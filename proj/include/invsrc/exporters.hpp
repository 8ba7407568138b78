#pragma once

#include "invsrc/experiments.hpp"

#include <string>

namespace invsrc {

// All files are written atomically (temp file + rename) with fixed-width
// scientific formatting (17 significant digits), so identical reports give
// byte-identical files.
void export_csv(const RunReport& report, const std::string& dir);
void export_json(const RunReport& report, const std::string& dir);
void export_plot(const RunReport& report, const std::string& dir);

std::string format_float(double v); // %.16e

} // namespace invsrc
