#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "beltrami/field.hpp"
#include "beltrami/maps.hpp"
#include "beltrami/solve_report.hpp"

namespace beltrami {

// Structural data H(z, w, zeta) = a zeta + b conj(zeta) + U(z, w, zeta) with
// |U| <= A |zeta|^alpha + B |w|^(2 alpha) + u(z).
struct FullStructure {
  cplx a;
  cplx b;
  double alpha = 0.0;
  double A = 0.0;
  double B = 0.0;
  std::optional<GridField> u_field;  // u(z) on the solver grid; zero when absent
};

// H(z, w, zeta) with third-slot Lipschitz constant k.
struct FullMap {
  std::function<cplx(cplx z, cplx w, cplx zeta)> eval;
  double k = 0.0;
  std::optional<FullStructure> structure;

  cplx operator()(cplx z, cplx w, cplx zeta) const { return eval(z, w, zeta); }

  // H(z, w, zeta) = A(zeta).
  static FullMap from_autonomous(const AutonomousMap& A);
  // Base map plus the zterm / wterm perturbations of a parsed spec.
  static FullMap from_spec(const MapSpec& spec, double period);
};

struct ConditionReport {
  int samples = 0;
  // Condition (1): max over samples of |H(z,w,x)-H(z,w,y)| - k |x-y| (<= 0 passes).
  double lipschitz_violation = 0.0;
  double lipschitz_estimate = 0.0;
  // Condition (2): max |H(z, w, 0)|.
  double zero_violation = 0.0;
  // Condition (3), Lusin measurability, cannot be sampled; always assumed.
  bool measurability_assumed = true;
  // Condition (4) with the declared constants: max |U| - bound (<= 0 passes).
  bool structure_declared = false;
  double structure_violation = 0.0;
  // Smallest (A, B) making the bound hold on the samples for the declared
  // (or default a = b = 0) linear part and alpha.
  double fitted_A = 0.0;
  double fitted_B = 0.0;
  double alpha_used = 0.0;

  bool lipschitz_ok(double tol = 1e-9) const { return lipschitz_violation <= tol; }
  bool zero_ok(double tol = 1e-12) const { return zero_violation <= tol; }
  bool structure_ok(double tol = 1e-9) const { return !structure_declared || structure_violation <= tol; }
  bool passed() const { return lipschitz_ok() && zero_ok() && structure_ok(); }
};

struct ConditionOptions {
  GridSpec grid{16};         // z sample locations
  double zeta_max = 1e4;     // |zeta| sampled log-uniformly in [1e-6, zeta_max] (plus 0)
  double w_max = 10.0;       // |w| sampled log-uniformly in [1e-3, w_max]
  std::uint64_t seed = 1;
};

ConditionReport check_conditions(const FullMap& H, int samples, const ConditionOptions& opt = {});

// Picard iteration psi <- c + S0 Pi0 H(z, f, psi) with damping; convergence
// is reported, not guaranteed.
SolveResult solve_full(const FullMap& H, const GridSpec& spec, cplx c_mean, double tol, int max_iter,
                       double damping = 1.0);

// || f_zbar - H(z, f, f_z) ||_2
double full_residual(const FullMap& H, const GridField& f);

}  // namespace beltrami
