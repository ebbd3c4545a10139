#include "beltrami/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/rng.hpp"

namespace beltrami {

namespace {

// Mean increments below this fraction of the largest mean count as converged:
// quadrature of |g|^p near zeros of g is not monotone at that level.
constexpr double kConvergedIncrement = 1e-4;

bool in_mask(const SampleMask& mask, std::size_t k) { return mask.empty() || mask[k] != 0; }

void check_mask(const SampleMask& mask, const GridSpec& spec) {
  if (!mask.empty() && mask.size() != spec.size())
    throw Error(ErrorCode::SpecMismatch, "sample mask size does not match the grid");
}

double distortion_of(cplx fz, cplx fzb) {
  const double a = std::abs(fz), b = std::abs(fzb);
  return a > b + 1e-12 ? (a + b) / (a - b) : kDegenerateDistortion;
}

}  // namespace

// ---------------------------------------------------------------------------
// Distortion

GridField distortion_field(const DerivedPair& df) {
  require_same_spec(df.dz, df.dzbar);
  std::vector<cplx> v(df.dz.spec().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = distortion_of(df.dz.periodic(k), df.dzbar.periodic(k));
  return {df.dz.spec(), {}, {}, std::move(v)};
}

GridField distortion_field(const GridField& f) { return distortion_field(derivatives(f)); }

DistortionStats distortion_stats(const GridField& K, const SampleMask& mask) {
  check_mask(mask, K.spec());
  DistortionStats st;
  std::vector<double> vals;
  for (std::size_t k = 0; k < K.spec().size(); ++k) {
    if (!in_mask(mask, k)) continue;
    ++st.counted;
    const double v = K.periodic(k).real();
    if (std::isinf(v)) {
      ++st.degenerate;
      continue;
    }
    vals.push_back(v);
  }
  std::sort(vals.begin(), vals.end());
  st.max = vals.empty() ? 1.0 : vals.back();
  for (double q : kDistortionLevels) {
    if (vals.empty()) {
      st.quantiles.push_back(1.0);
      continue;
    }
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(vals.size()))) ;
    st.quantiles.push_back(vals[std::min(vals.size() - 1, idx == 0 ? 0 : idx - 1)]);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Sobolev probe

namespace {

void validate_ladder(const std::vector<GridSpec>& specs) {
  if (specs.size() < 3)
    throw Error(ErrorCode::InsufficientLevels, "sobolev probe needs at least 3 refinement levels, got " +
                                                   std::to_string(specs.size()));
  for (std::size_t j = 1; j < specs.size(); ++j) {
    if (specs[j].n != 2 * specs[j - 1].n || specs[j].period != specs[j - 1].period)
      throw Error(ErrorCode::InvalidArgument, "ladder levels must double n on the same period");
  }
}

void validate_exponents(const std::vector<double>& p_grid) {
  if (p_grid.empty()) throw Error(ErrorCode::InvalidArgument, "exponent grid is empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] >= 1.0) || !std::isfinite(p_grid[i]))
      throw Error(ErrorCode::InvalidArgument, "exponents must be finite and >= 1");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "exponents must be increasing");
  }
}

struct TailFit {
  double p = std::numeric_limits<double>::infinity();
  double r2 = 1.0;
};

// Fits log mu(lambda) = c - p log lambda on the upper tail of the
// distribution function mu(lambda) = fraction of samples with g > lambda.
TailFit tail_fit(std::vector<double> g) {
  TailFit out;
  const std::size_t N = g.size();
  std::sort(g.begin(), g.end(), std::greater<>());
  const double q_lo = std::max(30.0 / static_cast<double>(N), 1e-4);
  const double q_hi = 0.1;
  if (q_lo >= q_hi) return out;
  std::vector<double> xs, ys;
  constexpr int kPoints = 12;
  for (int i = 0; i < kPoints; ++i) {
    const double q = q_hi * std::pow(q_lo / q_hi, static_cast<double>(i) / (kPoints - 1));
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(N));
    const double lambda = g[idx];
    const auto count = static_cast<double>(std::lower_bound(g.begin(), g.end(), lambda, std::greater<>()) - g.begin());
    if (lambda <= 0.0 || count <= 0.0) continue;
    xs.push_back(std::log(lambda));
    ys.push_back(std::log(count / static_cast<double>(N)));
  }
  if (xs.size() < 3) return out;
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (*mx - *mn < 1e-9) return out;
  const double m = static_cast<double>(xs.size());
  const double sx = std::accumulate(xs.begin(), xs.end(), 0.0), sy = std::accumulate(ys.begin(), ys.end(), 0.0);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double vx = sxx - sx * sx / m, vy = syy - sy * sy / m, cxy = sxy - sx * sy / m;
  if (vx <= 0.0) return out;
  const double slope = cxy / vx;
  out.p = -slope;
  out.r2 = vy > 0.0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return out;
}

}  // namespace

RegularityReport sobolev_probe(const std::vector<DerivedPair>& ladder, const std::vector<double>& p_grid) {
  std::vector<GridSpec> specs;
  for (const auto& pr : ladder) {
    require_same_spec(pr.dz, pr.dzbar);
    specs.push_back(pr.dz.spec());
  }
  validate_ladder(specs);
  validate_exponents(p_grid);

  RegularityReport rep;
  rep.p_grid = p_grid;
  for (const auto& s : specs) rep.grid_levels.push_back(s.n);

  std::vector<std::vector<double>> g(ladder.size());
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const auto& pr = ladder[j];
    g[j].resize(pr.dz.spec().size());
    for (std::size_t k = 0; k < g[j].size(); ++k) g[j][k] = std::abs(pr.dz.periodic(k)) + std::abs(pr.dzbar.periodic(k));
  }

  const std::size_t L = ladder.size();
  for (double p : p_grid) {
    std::vector<double> means(L), norms(L);
    for (std::size_t j = 0; j < L; ++j) {
      double s = 0.0;
      for (double v : g[j]) s += std::pow(v, p);
      means[j] = s / static_cast<double>(g[j].size());
      norms[j] = std::pow(means[j], 1.0 / p);
    }
    const double scale = *std::max_element(means.begin(), means.end());
    const double d1 = means[L - 2] - means[L - 3];
    const double d2 = means[L - 1] - means[L - 2];
    double ratio = 0.0;
    bool stable = true;
    if (std::abs(d1) > kConvergedIncrement * scale || std::abs(d2) > kConvergedIncrement * scale) {
      ratio = std::abs(d1) > 0.0 ? std::abs(d2) / std::abs(d1) : std::numeric_limits<double>::infinity();
      const double growth = norms[L - 1] / norms[L - 2] - 1.0;
      stable = ratio < 1.0 && growth <= 0.10;
    }
    rep.norms.push_back(std::move(norms));
    rep.increment_ratio.push_back(ratio);
    rep.stable.push_back(stable ? 1 : 0);
  }

  const auto first_unstable = std::find(rep.stable.begin(), rep.stable.end(), 0);
  if (first_unstable == rep.stable.end()) {
    rep.p_critical = std::numeric_limits<double>::infinity();
  } else if (first_unstable == rep.stable.begin()) {
    rep.p_critical = p_grid.front();
  } else {
    const auto i = static_cast<std::size_t>(first_unstable - rep.stable.begin());
    auto lg = [](double r) { return r > 0.0 ? std::log2(r) : -60.0; };
    const double y0 = lg(rep.increment_ratio[i - 1]), y1 = lg(rep.increment_ratio[i]);
    double p = p_grid[i];
    if (y1 > y0 && y1 >= 0.0) p = p_grid[i - 1] + (0.0 - y0) * (p_grid[i] - p_grid[i - 1]) / (y1 - y0);
    rep.p_critical = std::clamp(p, p_grid[i - 1], p_grid[i]);
  }

  const TailFit tf = tail_fit(g.back());
  rep.p_tail = tf.p;
  rep.fit_r2 = tf.r2;

  const DistortionStats ds = distortion_stats(distortion_field(ladder.back()));
  rep.distortion_max = ds.max;
  rep.distortion_quantiles = ds.quantiles;
  return rep;
}

RegularityReport sobolev_probe(const std::vector<GridField>& ladder, const std::vector<double>& p_grid) {
  std::vector<DerivedPair> pairs;
  pairs.reserve(ladder.size());
  for (const auto& f : ladder) pairs.push_back(derivatives(f));
  return sobolev_probe(pairs, p_grid);
}

SecondOrderReport second_order_probe(const std::vector<GridField>& ladder, double k, const std::vector<double>& q_grid) {
  if (!(k >= 0.0 && k < 1.0)) throw Error(ErrorCode::InvalidArgument, "second_order_probe needs 0 <= k < 1");
  std::vector<DerivedPair> pairs;
  pairs.reserve(ladder.size());
  for (const auto& f : ladder) pairs.push_back(derivatives(d_z(f)));
  SecondOrderReport out{sobolev_probe(pairs, q_grid), k > 0.0 ? 1.0 + 1.0 / k : std::numeric_limits<double>::infinity(),
                        true};
  for (std::size_t i = 0; i < q_grid.size(); ++i)
    if (q_grid[i] < out.threshold && !out.probe.stable[i]) out.stable_below_threshold = false;
  return out;
}

DerivedPair radial_extremal_pair(const GridSpec& spec, double K) {
  if (!(K >= 1.0)) throw Error(ErrorCode::InvalidArgument, "radial extremal needs K >= 1");
  const double beta = 1.0 / K - 1.0;
  const double c0 = 0.5 * spec.period + 0.5 * spec.spacing();
  const cplx z0(c0, c0);
  std::vector<cplx> dz(spec.size()), dzb(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const cplx zeta = spec.point(k) - z0;
    const double r = std::abs(zeta);
    const double rb = std::pow(r, beta);
    dz[k] = (1.0 + 0.5 * beta) * rb;
    dzb[k] = 0.5 * beta * (zeta / std::conj(zeta)) * rb;
  }
  return {GridField(spec, {}, {}, std::move(dz)), GridField(spec, {}, {}, std::move(dzb))};
}

// ---------------------------------------------------------------------------
// Coefficients and gradient equation

std::pair<GridField, GridField> directional_derivatives(const GridField& f) {
  const DerivedPair df = derivatives(f);
  return {df.dz + df.dzbar, cplx(0.0, 1.0) * (df.dz - df.dzbar)};
}

CoefficientFields recover_coefficients(const GridField& fx, const GridField& fy, double /*k*/) {
  require_same_spec(fx, fy);
  const DerivedPair dx = derivatives(fx), dy = derivatives(fy);
  const GridSpec spec = fx.spec();
  const std::size_t len = spec.size();

  double scale = 0.0;
  for (std::size_t k = 0; k < len; ++k)
    scale = std::max({scale, std::abs(dx.dz.periodic(k)), std::abs(dy.dz.periodic(k))});

  std::vector<cplx> mu(len), nu(len);
  std::vector<std::uint8_t> ok(len, 0);
  std::size_t flagged = 0;
  for (std::size_t k = 0; k < len; ++k) {
    const cplx P = dx.dz.periodic(k), Q = dy.dz.periodic(k);
    Eigen::Matrix2cd M;
    M << P, std::conj(P), Q, std::conj(Q);
    Eigen::Vector2cd rhs(dx.dzbar.periodic(k), dy.dzbar.periodic(k));
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (!(s(0) > 1e-12 * scale) || scale == 0.0) {
      ++flagged;
      continue;  // mu = nu = 0
    }
    Eigen::Vector2cd x;
    if (s(1) >= 1e-6 * s(0)) {
      x = svd.solve(rhs);
      ok[k] = 1;
    } else {
      // least-norm solution on the dominant singular direction
      x = svd.matrixV().col(0) * (svd.matrixU().col(0).adjoint() * rhs)(0) / s(0);
      ++flagged;
    }
    mu[k] = x(0);
    nu[k] = x(1);
  }
  return {GridField(spec, {}, {}, std::move(mu)), GridField(spec, {}, {}, std::move(nu)), std::move(ok), flagged};
}

CoefficientStats coefficient_stats(const CoefficientFields& c, const SampleMask& mask) {
  check_mask(mask, c.mu.spec());
  CoefficientStats st;
  for (std::size_t k = 0; k < c.conditioned.size(); ++k) {
    if (!c.conditioned[k] || !in_mask(mask, k)) continue;
    ++st.used;
    st.max_sum = std::max(st.max_sum, std::abs(c.mu.periodic(k)) + std::abs(c.nu.periodic(k)));
  }
  return st;
}

GradientCheck gradient_equation_check(const GridField& f, const CoefficientFields& coeffs, const SampleMask& mask) {
  require_same_spec(f, coeffs.mu);
  check_mask(mask, f.spec());
  const DerivedPair dpsi = derivatives(d_z(f));
  GradientCheck out;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < coeffs.conditioned.size(); ++k) {
    if (!coeffs.conditioned[k] || !in_mask(mask, k)) continue;
    const cplx mu = coeffs.mu.periodic(k), nu = coeffs.nu.periodic(k);
    const cplx pz = dpsi.dz.periodic(k), pzb = dpsi.dzbar.periodic(k);
    const double s = 1.0 - std::norm(nu);
    const cplx r = pzb - (mu / s) * pz - (std::conj(mu) * nu / s) * std::conj(pz);
    num += std::norm(r);
    den += std::norm(pz) + std::norm(pzb);
    out.k_prime = std::max(out.k_prime, std::abs(mu) / (1.0 - std::abs(nu)));
    ++out.used;
  }
  out.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

DirectionalDistortion directional_distortion(const GridField& f, int directions, const SampleMask& mask,
                                             double grad_floor) {
  if (directions < 1) throw Error(ErrorCode::InvalidArgument, "directions must be >= 1");
  check_mask(mask, f.spec());
  const auto [fx, fy] = directional_derivatives(f);
  const DerivedPair dx = derivatives(fx), dy = derivatives(fy);
  DirectionalDistortion out;
  for (int j = 0; j < directions; ++j) {
    const double t = std::numbers::pi * j / directions;
    const double ca = std::cos(t), sa = std::sin(t);
    for (std::size_t k = 0; k < f.spec().size(); ++k) {
      if (!in_mask(mask, k)) continue;
      const cplx gz = ca * dx.dz.periodic(k) + sa * dy.dz.periodic(k);
      const cplx gzb = ca * dx.dzbar.periodic(k) + sa * dy.dzbar.periodic(k);
      if (std::abs(gz) + std::abs(gzb) <= grad_floor) continue;
      ++out.counted;
      const double K = distortion_of(gz, gzb);
      if (std::isinf(K))
        ++out.degenerate;
      else
        out.max = std::max(out.max, K);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hodograph

namespace {

class BilinearField {
 public:
  explicit BilinearField(const GridField& f) : f_(f) {}

  cplx operator()(cplx z) const {
    const GridSpec& s = f_.spec();
    const double h = s.spacing();
    const double x = z.real() / h, y = z.imag() / h;
    const double fx = std::floor(x), fy = std::floor(y);
    const double tx = x - fx, ty = y - fy;
    const int n = s.n;
    auto wrap = [n](double v) { return static_cast<int>(((static_cast<long long>(v) % n) + n) % n); };
    const int j0 = wrap(fx), i0 = wrap(fy), j1 = (j0 + 1) % n, i1 = (i0 + 1) % n;
    const cplx p = (1 - tx) * (1 - ty) * f_.periodic(i0, j0) + tx * (1 - ty) * f_.periodic(i0, j1) +
                   (1 - tx) * ty * f_.periodic(i1, j0) + tx * ty * f_.periodic(i1, j1);
    return f_.c() * z + f_.d() * std::conj(z) + p;
  }

 private:
  const GridField& f_;
};

}  // namespace

HodographResult hodograph_check(const GridField& f, const AutonomousMap& A, int sample_points,
                                const HodographOptions& opt) {
  if (sample_points < 1) throw Error(ErrorCode::InvalidArgument, "hodograph_check needs sample_points >= 1");
  check_mask(opt.mask, f.spec());
  const DerivedPair df = derivatives(f);
  const GridSpec& spec = f.spec();

  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double J = std::norm(df.dz.periodic(k)) - std::norm(df.dzbar.periodic(k));
    if (in_mask(opt.mask, k) && J > std::max(opt.jacobian_min, 0.0)) candidates.push_back(k);
  }

  HodographResult out;
  if (candidates.empty()) {
    out.skipped = sample_points;
    return out;
  }
  const BilinearField F(f);
  Rng rng(opt.seed);
  const double h = spec.spacing();
  for (int s = 0; s < sample_points; ++s) {
    const std::size_t idx = candidates[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(candidates.size()) - 1))];
    const cplx z0 = spec.point(idx);
    const cplx w0 = f.total(idx);
    const cplx a = df.dz.periodic(idx), b = df.dzbar.periodic(idx);
    const double Jf = std::norm(a) - std::norm(b);
    // Inverse of the local differential e -> a e + b conj(e).
    auto solve_lin = [&](cplx e) { return (std::conj(a) * e - b * std::conj(e)) / Jf; };

    // Damped fixed-point refinement of the local inverse of the interpolant.
    auto invert = [&](cplx w, cplx& z) {
      z = z0 + solve_lin(w - w0);
      const double target = 1e-12 * std::max(1.0, std::abs(w));
      for (int it = 0; it < 50; ++it) {
        const cplx e = w - F(z);
        if (std::abs(e) <= target) return true;
        z += solve_lin(e);
      }
      return std::abs(w - F(z)) <= target;
    };

    const double delta = h * std::abs(a);
    cplx zp, zm, zpi, zmi;
    if (!invert(w0 + delta, zp) || !invert(w0 - delta, zm) || !invert(w0 + cplx(0, delta), zpi) ||
        !invert(w0 - cplx(0, delta), zmi)) {
      ++out.skipped;
      continue;
    }
    const cplx hx = (zp - zm) / (2.0 * delta), hy = (zpi - zmi) / (2.0 * delta);
    const cplx hw = 0.5 * (hx - cplx(0, 1) * hy), hwb = 0.5 * (hx + cplx(0, 1) * hy);
    const double J = std::norm(hw) - std::norm(hwb);
    const double scale = std::abs(hw);
    if (!(J > 0.0) || scale == 0.0) {
      ++out.skipped;
      continue;
    }
    ++out.accepted;
    out.residual = std::max(out.residual, std::abs(hwb + J * A(std::conj(hw) / J)) / scale);
    out.printed_residual = std::max(out.printed_residual, std::abs(hwb - J * A(hw / J)) / scale);
    out.max_ratio = std::max(out.max_ratio, std::abs(hwb) / scale);
  }
  return out;
}

}  // namespace beltrami
