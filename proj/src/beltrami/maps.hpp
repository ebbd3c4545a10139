#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/field.hpp"

namespace beltrami {

// Data of A(zeta) = a zeta + b conj(zeta) + O(|zeta|^alpha), with the
// remainder bounded by C |zeta|^alpha + C.
struct LinearAtInfinity {
  cplx a;
  cplx b;
  double alpha = 0.0;
  double C = 0.0;
};

// Pointwise map A: C -> C with declared Lipschitz constant k.
class AutonomousMap {
 public:
  AutonomousMap(std::function<cplx(cplx)> eval, double k, std::optional<LinearAtInfinity> linf = std::nullopt,
                std::string name = "custom");

  static AutonomousMap linear(cplx a, cplx b);
  static AutonomousMap abs(double k);
  static AutonomousMap smooth_saturating(cplx a, cplx b, double s);

  cplx operator()(cplx zeta) const { return eval_(zeta); }
  double k() const { return k_; }
  const std::optional<LinearAtInfinity>& linear_at_infinity() const { return linf_; }
  const std::string& name() const { return name_; }

 private:
  std::function<cplx(cplx)> eval_;
  double k_;
  std::optional<LinearAtInfinity> linf_;
  std::string name_;
};

// Max of |A(z)-A(w)|/|z-w| over random pairs in the disk of the given radius:
// half uniform pairs, half close pairs probing the local differential.
double estimate_lipschitz(const AutonomousMap& A, int samples, double radius, std::uint64_t seed = 1);

struct LinearFit {
  cplx a;
  cplx b;
  double alpha = 0.0;
  double C = 0.0;
  bool ok = false;
  std::vector<double> remainder;  // max |A - a z - b conj z| on each circle
};

// Least-squares a, b on the largest circle; alpha, C from log remainders.
LinearFit fit_linear_part(const AutonomousMap& A, const std::vector<double>& radii);

// Additive perturbations of the map grammar.
struct MapTerm {
  enum class Kind { ZTerm, WTerm } kind;
  double amplitude = 0.0;
  int k1 = 0;
  int k2 = 0;
};

// Result of parsing `linear:..|kabs:..|smoothsat:..` optionally followed by
// `+zterm:amp,k1,k2` (adds amp sin(2 pi (k1 x + k2 y)/L)) and `+wterm:amp`
// (adds amp w/(1+|w|)).
struct MapSpec {
  std::string text;
  AutonomousMap base;
  std::vector<MapTerm> terms;

  bool autonomous() const { return terms.empty(); }
  // Linear base map coefficients, when the base is `linear:`.
  std::optional<std::pair<cplx, cplx>> linear_coefficients;
};

MapSpec parse_map(const std::string& text);

// Forcing grammar: '+'-joined `mode:re,im,k1,k2` plane waves and
// `bump:re,im,sigma` Gaussians centered at (L/2, L/2) (nearest periodic image).
GridField sample_forcing(const std::string& text, const GridSpec& spec);

// 1 where |h| <= relative * max|h|.
std::vector<std::uint8_t> forcing_free_mask(const GridField& h, double relative = 1e-12);

}  // namespace beltrami
