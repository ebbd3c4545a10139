#pragma once

#include <cstdint>
#include <string>

#include "beltrami/field.hpp"
#include "beltrami/solve_report.hpp"

namespace beltrami {

// Constant coefficients of f_zbar = a f_z + b conj(f_z) + u.
struct CCParams {
  cplx a;
  cplx b;

  // Throws EllipticityViolated unless |a| + |b| < 1.
  void validate() const;
};

enum class MuNuPath { PrintedFormula, NumericRoot };
std::string to_string(MuNuPath path);

// Parameters of the substitution zeta = z + mu conj(z), g = f + nu conj(f).
struct ChangeOfVars {
  cplx mu;
  cplx nu;
  MuNuPath path = MuNuPath::NumericRoot;
  // Candidate from the closed-form expressions and its transform residual.
  cplx printed_mu;
  cplx printed_nu;
  double printed_residual = 0.0;
};

// Residuals of dg/dzbar - v - lambda conj(v) for two choices of lambda.
struct TransformResidual {
  double literal = 0.0;   // lambda = a b
  double induced = 0.0;   // lambda = mu nu, the constant the substitution produces
  cplx induced_coefficient;
};

ChangeOfVars compute_mu_nu(const CCParams& p);

// Candidate (mu, nu) from the closed-form expressions exactly as printed
// (may be NaN when the discriminant is negative).
std::pair<cplx, cplx> printed_mu_nu(const CCParams& p);

// Root of mu (1 + nu conj(b)) = -a, nu (1 + mu conj(a)) = -b inside the unit
// bidisk, by complex Newton iteration from (-a, -b).
std::pair<cplx, cplx> numeric_mu_nu(const CCParams& p);

// Finite-difference oracle: for `trials` random trigonometric f, builds u, g,
// v through the substitution and measures dg/dzbar - v - lambda conj(v).
TransformResidual verify_transform(const CCParams& p, cplx mu, cplx nu, int trials, std::uint64_t seed = 1);
inline TransformResidual verify_transform(const CCParams& p, const ChangeOfVars& cv, int trials,
                                          std::uint64_t seed = 1) {
  return verify_transform(p, cv.mu, cv.nu, trials, seed);
}

// || f_zbar - a f_z - b conj(f_z) - u ||_2
double cc_residual(const CCParams& p, const GridField& f, const GridField& u);

// Contraction iteration phi <- a psi + b conj(psi) + u, psi = c + S0 Pi0 phi.
SolveResult solve_cc_neumann(const CCParams& p, const GridField& u, cplx c_mean, double tol, int max_iter);

// Change of variables to an inhomogeneous Cauchy-Riemann equation, solved
// mode by mode on the sheared plane waves. Exact for band-limited u; rejects
// u with Nyquist content.
SolveResult solve_cc_changevar(const CCParams& p, const GridField& u, cplx c_mean);

}  // namespace beltrami
