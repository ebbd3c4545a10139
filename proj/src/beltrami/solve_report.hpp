#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "beltrami/field.hpp"

namespace beltrami {

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  // L2 equation residual per iteration
  double contraction_ratio = 0.0;        // geometric mean of successive residual ratios
  double final_residual = 0.0;
  bool converged = false;
  std::string method;
  std::string warning;

  // Fills iterations, final_residual and contraction_ratio from the history.
  void finalize();
};

struct SolveResult {
  GridField solution;
  SolveReport report;
};

inline void SolveReport::finalize() {
  iterations = static_cast<int>(residual_history.size());
  final_residual = residual_history.empty() ? 0.0 : residual_history.back();
  contraction_ratio = 0.0;
  if (residual_history.size() >= 2 && residual_history.front() > 0.0 && residual_history.back() > 0.0) {
    // The product of successive ratios telescopes to last/first.
    const double steps = static_cast<double>(residual_history.size() - 1);
    contraction_ratio = std::pow(residual_history.back() / residual_history.front(), 1.0 / steps);
  }
}

}  // namespace beltrami
