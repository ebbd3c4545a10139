#pragma once

#include <functional>

#include "beltrami/field.hpp"
#include "beltrami/solve_report.hpp"

namespace beltrami::detail {

// Right-hand side evaluated at sample `idx` with w = f(z) and zeta = f_z.
using PointwiseRhs = std::function<cplx(std::size_t idx, cplx w, cplx zeta)>;

struct PicardOptions {
  cplx c_mean;
  double tol = 1e-10;
  double residual_scale = 1.0;  // convergence when residual <= tol * scale
  int max_iter = 500;
  double damping = 1.0;
  bool needs_w = false;  // skip reconstructing f(z) when the rhs ignores it
  std::string method;
};

// Iterates phi = f_zbar: psi = c + S0 Pi0 phi, f = antiderivative(phi, c),
// target = rhs(z, f, psi), phi <- (1 - damping) phi + damping target.
// The residual ||phi - target||_2 is the equation residual of f.
SolveResult picard_solve(const GridSpec& spec, const PointwiseRhs& rhs, const PicardOptions& opt);

}  // namespace beltrami::detail
