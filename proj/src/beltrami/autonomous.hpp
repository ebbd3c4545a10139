#pragma once

#include <cstdint>

#include "beltrami/field.hpp"
#include "beltrami/maps.hpp"
#include "beltrami/solve_report.hpp"

namespace beltrami {

struct AutonomousOptions {
  double tol = 1e-10;
  int max_iter = 1000;
  // Audit of the declared k by estimate_lipschitz.
  int audit_samples = 4000;
  double audit_radius = 100.0;
  std::uint64_t seed = 1;
};

// Solves f_zbar = A(f_z) + h with mean(f_z) = c_mean by the contraction
// psi <- c_mean + S0 Pi0 (A(psi) + h). Throws when A.k() >= 1 or when the
// sampled Lipschitz estimate exceeds the declared k by more than 1e-6.
SolveResult solve_autonomous(const AutonomousMap& A, const GridField& h, cplx c_mean,
                             const AutonomousOptions& opt = {});

// || f_zbar - A(f_z) - h ||_2
double residual(const AutonomousMap& A, const GridField& f, const GridField& h);

}  // namespace beltrami
