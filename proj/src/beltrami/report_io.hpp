#pragma once

#include <string>
#include <vector>

#include "beltrami/analysis.hpp"
#include "beltrami/solve_report.hpp"

namespace beltrami {

// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

// `iteration,residual` rows.
std::string solve_history_csv(const SolveReport& r);
// One-row summary: iterations,final_residual,contraction_ratio,converged,method,warning
std::string solve_summary_csv(const SolveReport& r);

// `record,p,n,norm,p_critical,fit_r2,distortion_max`: one `norm` row per
// (p, level) then a `summary` row.
std::string regularity_csv(const RegularityReport& r);

struct GraymapScale {
  double min = 0.0;
  double max = 0.0;
};

// Binary 8-bit PGM (P5) of a real grid, linearly scaled from min to max.
// Non-finite samples are painted white.
std::string graymap(const std::vector<double>& values, int n, GraymapScale* scale = nullptr);

void write_text(const std::string& path, const std::string& text);

}  // namespace beltrami
