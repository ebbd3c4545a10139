#include "beltrami/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "beltrami/error.hpp"

namespace beltrami {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string solve_history_csv(const SolveReport& r) {
  std::string out = "iteration,residual\n";
  for (std::size_t i = 0; i < r.residual_history.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(r.residual_history[i]) + "\n";
  return out;
}

namespace {
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}
}  // namespace

std::string solve_summary_csv(const SolveReport& r) {
  return "iterations,final_residual,contraction_ratio,converged,method,warning\n" + std::to_string(r.iterations) + "," +
         format_double(r.final_residual) + "," + format_double(r.contraction_ratio) + "," +
         (r.converged ? "1" : "0") + "," + csv_escape(r.method) + "," + csv_escape(r.warning) + "\n";
}

std::string regularity_csv(const RegularityReport& r) {
  std::string out = "record,p,n,norm,p_critical,fit_r2,distortion_max\n";
  for (std::size_t i = 0; i < r.p_grid.size(); ++i)
    for (std::size_t j = 0; j < r.grid_levels.size(); ++j)
      out += "norm," + format_double(r.p_grid[i]) + "," + std::to_string(r.grid_levels[j]) + "," +
             format_double(r.norms[i][j]) + ",,,\n";
  out += "summary,,,," + format_double(r.p_critical) + "," + format_double(r.fit_r2) + "," +
         format_double(r.distortion_max) + "\n";
  return out;
}

std::string graymap(const std::vector<double>& values, int n, GraymapScale* scale) {
  if (n <= 0 || values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw Error(ErrorCode::InvalidArgument, "graymap needs n*n values");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) lo = hi = 0.0;
  if (scale) *scale = {lo, hi};
  std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
  const double span = hi - lo;
  // Row 0 of the grid is y = 0; images run top-down, so flip.
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < n; ++j) {
      const double v = values[static_cast<std::size_t>(i) * n + j];
      int g = 255;
      if (std::isfinite(v)) g = span > 0.0 ? static_cast<int>(std::lround(255.0 * (v - lo) / span)) : 0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(g, 0, 255))));
    }
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw Error(ErrorCode::Io, "write failed: " + path);
}

}  // namespace beltrami
