#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "beltrami/field.hpp"
#include "beltrami/maps.hpp"

namespace beltrami {

// Optional per-sample restriction; empty means "every sample".
using SampleMask = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Distortion

inline constexpr double kDegenerateDistortion = std::numeric_limits<double>::infinity();

// K = (|f_z| + |f_zbar|) / (|f_z| - |f_zbar|) per sample, stored in the real
// part; +inf where |f_z| <= |f_zbar| + 1e-12.
GridField distortion_field(const GridField& f);
GridField distortion_field(const DerivedPair& df);

struct DistortionStats {
  double max = 1.0;                     // over nondegenerate samples
  std::vector<double> quantiles;        // at kDistortionLevels
  std::size_t degenerate = 0;
  std::size_t counted = 0;              // samples considered (after mask)
  double degenerate_fraction() const { return counted ? static_cast<double>(degenerate) / counted : 0.0; }
};

inline const std::vector<double> kDistortionLevels{0.5, 0.9, 0.99, 1.0};

DistortionStats distortion_stats(const GridField& K, const SampleMask& mask = {});

// ---------------------------------------------------------------------------
// Sobolev exponent probe

struct RegularityReport {
  double p_critical = std::numeric_limits<double>::infinity();
  double fit_r2 = 1.0;       // R^2 of the distribution-function tail fit
  double p_tail = std::numeric_limits<double>::infinity();  // tail-slope estimate
  double distortion_max = 1.0;
  std::vector<double> distortion_quantiles;
  std::vector<int> grid_levels;
  std::vector<double> p_grid;
  std::vector<std::vector<double>> norms;  // norms[p][level] of |f_z| + |f_zbar|
  std::vector<double> increment_ratio;     // per p, last / previous increment of the mean |Df|^p
  std::vector<std::uint8_t> stable;        // per p
};

// Ladder of derivative pairs at grid sizes n, 2n, 4n, ... (at least three).
// p is stable when the mean of |Df|^p converges under refinement: successive
// increments shrink and the norm grows by at most 10% per doubling, or both
// increments are below 1e-4 of the largest mean.
// p_critical interpolates log2 of the increment ratio to zero between the last
// stable and the first unstable p; +inf when every p is stable.
RegularityReport sobolev_probe(const std::vector<DerivedPair>& ladder, const std::vector<double>& p_grid);
// Same, with spectral derivatives of each field.
RegularityReport sobolev_probe(const std::vector<GridField>& ladder, const std::vector<double>& p_grid);

struct SecondOrderReport {
  RegularityReport probe;
  double threshold = 0.0;            // 1 + 1/k
  bool stable_below_threshold = true;  // every q < threshold in q_grid stable
};

// Probe of the derivatives of f_z, i.e. of the second derivatives of f.
SecondOrderReport second_order_probe(const std::vector<GridField>& ladder, double k, const std::vector<double>& q_grid);

// Analytic derivatives of z0 + (z - z0)|z - z0|^(1/K - 1), centered half a
// cell off the grid near the middle of the period.
DerivedPair radial_extremal_pair(const GridSpec& spec, double K);

// ---------------------------------------------------------------------------
// Corollary-type diagnostics on solutions

struct CoefficientFields {
  GridField mu;
  GridField nu;
  std::vector<std::uint8_t> conditioned;  // 1 where the 2x2 system was well conditioned
  std::size_t flagged = 0;
};

// Per sample, solves h_zbar = mu h_z + nu conj(h_z) for h in {fx, fy}.
// Samples whose system has smallest singular value < 1e-6 * largest (or is
// numerically zero) are flagged and receive the least-norm solution.
CoefficientFields recover_coefficients(const GridField& fx, const GridField& fy, double k);
// fx = f_z + f_zbar, fy = i (f_z - f_zbar).
std::pair<GridField, GridField> directional_derivatives(const GridField& f);

struct CoefficientStats {
  double max_sum = 0.0;  // max |mu| + |nu|
  std::size_t used = 0;
};
CoefficientStats coefficient_stats(const CoefficientFields& c, const SampleMask& mask = {});

struct GradientCheck {
  double residual = 0.0;  // relative L2 over the conditioned (and masked) set
  double k_prime = 0.0;   // max |mu| / (1 - |nu|)
  std::size_t used = 0;
};

// Residual of (f_z)_zbar - mu/(1-|nu|^2) (f_z)_z - conj(mu) nu/(1-|nu|^2) conj((f_z)_z).
GradientCheck gradient_equation_check(const GridField& f, const CoefficientFields& coeffs, const SampleMask& mask = {});

struct DirectionalDistortion {
  double max = 1.0;
  std::size_t degenerate = 0;
  std::size_t counted = 0;
};

// Distortion of cos(t) fx + sin(t) fy over `directions` angles in [0, pi),
// where |g_z| + |g_zbar| exceeds grad_floor.
DirectionalDistortion directional_distortion(const GridField& f, int directions = 16, const SampleMask& mask = {},
                                             double grad_floor = 1e-8);

struct HodographResult {
  double residual = 0.0;          // max |h_wbar + J A(conj(h_w)/J)| / |h_w|
  double printed_residual = 0.0;  // max |h_wbar - J A(h_w/J)| / |h_w|
  double max_ratio = 0.0;         // max |h_wbar| / |h_w|
  int accepted = 0;
  int skipped = 0;
};

struct HodographOptions {
  double jacobian_min = 0.0;  // only samples with J_f above this
  SampleMask mask;
  std::uint64_t seed = 1;
};

// Inverts the bilinear interpolant of f near random samples and checks the
// equation satisfied by the inverse h = f^{-1}.
HodographResult hodograph_check(const GridField& f, const AutonomousMap& A, int sample_points,
                                const HodographOptions& opt = {});

}  // namespace beltrami
