#include "beltrami/linear_solve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/fft.hpp"
#include "beltrami/rng.hpp"

namespace beltrami {

void CCParams::validate() const {
  const double s = std::abs(a) + std::abs(b);
  if (!(s < 1.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ellipticity violated: |a|+|b| = %g ≥ 1", s);
    throw Error(ErrorCode::EllipticityViolated, buf);
  }
}

std::string to_string(MuNuPath path) {
  return path == MuNuPath::PrintedFormula ? "printed-formula" : "numeric-root";
}

// ---------------------------------------------------------------------------
// mu, nu

std::pair<cplx, cplx> printed_mu_nu(const CCParams& p) {
  const double A = std::abs(p.a), B = std::abs(p.b);
  const double disc_mu = (1.0 + A - B * B) * (1.0 + A - B * B) - 4.0 * A * A;
  const double disc_nu = (1.0 + B - A * A) * (1.0 + B - A * A) - 4.0 * A * A;
  const cplx mu = -2.0 * p.a / (1.0 + A * A - B * B + std::sqrt(disc_mu));
  const cplx nu = -2.0 * p.b / (1.0 + B * B - A * A + std::sqrt(disc_nu));
  return {mu, nu};
}

std::pair<cplx, cplx> numeric_mu_nu(const CCParams& p) {
  p.validate();
  const cplx ca = std::conj(p.a), cb = std::conj(p.b);
  cplx mu = -p.a, nu = -p.b;
  for (int it = 0; it < 100; ++it) {
    const cplx F1 = mu * (1.0 + nu * cb) + p.a;
    const cplx F2 = nu * (1.0 + mu * ca) + p.b;
    if (std::abs(F1) + std::abs(F2) < 1e-16) break;
    // Both equations are holomorphic in (mu, nu).
    const cplx j11 = 1.0 + nu * cb, j12 = mu * cb;
    const cplx j21 = nu * ca, j22 = 1.0 + mu * ca;
    const cplx det = j11 * j22 - j12 * j21;
    mu -= (j22 * F1 - j12 * F2) / det;
    nu -= (j11 * F2 - j21 * F1) / det;
  }
  if (!(std::abs(mu) < 1.0 && std::abs(nu) < 1.0))
    throw Error(ErrorCode::InvalidArgument, "numeric (mu, nu) root left the unit bidisk");
  return {mu, nu};
}

namespace {

constexpr double kTransformTolerance = 1e-8;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Total trigonometric test map with an affine part.
struct TestMap {
  TrigPolynomial periodic;
  cplx c, d;

  cplx value(cplx z) const { return c * z + d * std::conj(z) + periodic(z); }
  cplx dz(cplx z) const { return c + periodic.dz(z); }
  cplx dzbar(cplx z) const { return d + periodic.dzbar(z); }
};

// 8th order central difference weights at offsets 1..4.
constexpr std::array<double, 4> kFd{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};

template <class Fn>
cplx fd_dzbar(const Fn& g, cplx z, double h) {
  cplx dx{}, dy{};
  for (int k = 0; k < 4; ++k) {
    const double s = (k + 1) * h;
    dx += kFd[k] * (g(z + s) - g(z - s));
    dy += kFd[k] * (g(z + cplx(0, s)) - g(z - cplx(0, s)));
  }
  return 0.5 * (dx + cplx(0, 1) * dy) / h;
}

}  // namespace

TransformResidual verify_transform(const CCParams& p, cplx mu, cplx nu, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "verify_transform requires trials >= 1");
  TransformResidual out;
  out.induced_coefficient = mu * nu;
  if (!finite(mu) || !finite(nu)) {
    out.literal = out.induced = std::numeric_limits<double>::infinity();
    return out;
  }
  const double L = 2.0 * std::numbers::pi;
  const double h = 2e-3 * L;
  const cplx lam_literal = p.a * p.b, lam_induced = mu * nu;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const TestMap f{TrigPolynomial::random(L, 3, 1.0, rng.next_u64()), 0.5 * rng.complex_normal(),
                    0.5 * rng.complex_normal()};
    auto zeta_of = [&](cplx z) { return z + mu * std::conj(z); };
    auto g = [&](cplx z) {
      const cplx fz = f.value(zeta_of(z));
      return fz + nu * std::conj(fz);
    };
    auto u = [&](cplx zeta) { return f.dzbar(zeta) - p.a * f.dz(zeta) - p.b * std::conj(f.dz(zeta)); };
    double num_lit = 0.0, num_ind = 0.0, den = 0.0;
    constexpr int m = 16;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const cplx z((j + 0.37) * L / m, (i + 0.61) * L / m);
        const cplx v = u(zeta_of(z));
        const cplx gzb = fd_dzbar(g, z, h);
        num_lit += std::norm(gzb - v - lam_literal * std::conj(v));
        num_ind += std::norm(gzb - v - lam_induced * std::conj(v));
        den += std::norm(v);
      }
    }
    const double scale = den > 0.0 ? den : 1.0;
    out.literal = std::max(out.literal, std::sqrt(num_lit / scale));
    out.induced = std::max(out.induced, std::sqrt(num_ind / scale));
  }
  return out;
}

ChangeOfVars compute_mu_nu(const CCParams& p) {
  p.validate();
  ChangeOfVars cv;
  std::tie(cv.printed_mu, cv.printed_nu) = printed_mu_nu(p);
  cv.printed_residual = verify_transform(p, cv.printed_mu, cv.printed_nu, 2).induced;
  if (cv.printed_residual <= kTransformTolerance) {
    cv.mu = cv.printed_mu;
    cv.nu = cv.printed_nu;
    cv.path = MuNuPath::PrintedFormula;
    return cv;
  }
  std::tie(cv.mu, cv.nu) = numeric_mu_nu(p);
  cv.path = MuNuPath::NumericRoot;
  return cv;
}

// ---------------------------------------------------------------------------
// Solvers

double cc_residual(const CCParams& p, const GridField& f, const GridField& u) {
  require_same_spec(f, u);
  const DerivedPair df = derivatives(f);
  std::vector<cplx> r(f.spec().size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const cplx fz = df.dz.periodic(k);
    r[k] = df.dzbar.periodic(k) - p.a * fz - p.b * std::conj(fz) - u.total(k);
  }
  return lp_norm(GridField(f.spec(), {}, {}, std::move(r)), 2.0);
}

SolveResult solve_cc_neumann(const CCParams& p, const GridField& u, cplx c_mean, double tol, int max_iter) {
  p.validate();
  if (u.has_affine_part()) throw Error(ErrorCode::InvalidArgument, "forcing u must have a zero affine part");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  const GridSpec spec = u.spec();
  const double target = tol * std::max(1.0, lp_norm(u, 2.0, true));

  // phi = a psi + b conj(psi) + u evaluated at psi = c + S0 Pi0 phi
  auto step = [&](const GridField& phi) {
    const GridField s = beurling(remove_mean(phi));
    std::vector<cplx> v(spec.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const cplx psi = c_mean + s.periodic(k);
      v[k] = p.a * psi + p.b * std::conj(psi) + u.periodic(k);
    }
    return GridField(spec, {}, {}, std::move(v));
  };

  SolveReport report;
  report.method = "neumann";
  std::vector<cplx> start(spec.size());
  for (std::size_t k = 0; k < start.size(); ++k)
    start[k] = p.a * c_mean + p.b * std::conj(c_mean) + u.periodic(k);
  GridField phi(spec, {}, {}, std::move(start));
  GridField best = phi;
  double best_r = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    GridField next = step(phi);
    const double r = lp_norm(phi - next, 2.0);
    report.residual_history.push_back(r);
    if (r < best_r) {
      best_r = r;
      best = phi;
    }
    if (r <= target) {
      report.converged = true;
      break;
    }
    phi = std::move(next);
  }
  report.finalize();
  return {antiderivative_zbar(best, c_mean), std::move(report)};
}

SolveResult solve_cc_changevar(const CCParams& p, const GridField& u, cplx c_mean) {
  p.validate();
  if (u.has_affine_part()) throw Error(ErrorCode::InvalidArgument, "forcing u must have a zero affine part");
  const ChangeOfVars cv = compute_mu_nu(p);
  const cplx mu = cv.mu, nu = cv.nu;
  const cplx lambda = mu * nu;
  const double nu_scale = 1.0 - std::norm(nu);

  const SpectralCoeffs us = to_spectral(u);
  double total = 0.0, nyquist = 0.0;
  for (std::size_t m = 0; m < us.coeffs.size(); ++m) {
    total += std::norm(us.coeffs[m]);
    if (us.is_nyquist(m)) nyquist += std::norm(us.coeffs[m]);
  }
  if (nyquist > 1e-24 * total)
    throw Error(ErrorCode::ShearResampling,
                "shear resampling requires band-limited u: forcing has Nyquist-mode content");

  // Mode k of u becomes, as a function of z, a plane wave with wavevector
  // K' = K + mu conj(K). g solves dg/dzbar = v + lambda conj(v) wave by wave,
  // and f = (g - nu conj(g)) / (1 - |nu|^2) maps each wave back onto modes +-k.
  const int n = u.spec().n;
  SpectralCoeffs fs{u.spec(), std::vector<cplx>(us.coeffs.size())};
  for (std::size_t m = 1; m < us.coeffs.size(); ++m) {
    const cplx uk = us.coeffs[m];
    if (uk == cplx{}) continue;
    const cplx K = us.wavevector(m);
    const cplx Kp = K + mu * std::conj(K);
    const cplx g_plus = uk / dzbar_symbol(Kp);
    const cplx g_minus = lambda * std::conj(uk) / dzbar_symbol(-Kp);
    const auto r = static_cast<int>(m / static_cast<std::size_t>(n));
    const auto s = static_cast<int>(m % static_cast<std::size_t>(n));
    const std::size_t neg = static_cast<std::size_t>(fft::negated_index(r, n)) * n + fft::negated_index(s, n);
    fs.coeffs[m] += (g_plus - nu * std::conj(g_minus)) / nu_scale;
    fs.coeffs[neg] += (g_minus - nu * std::conj(g_plus)) / nu_scale;
  }
  // Mean of the equation fixes d.
  const cplx d = p.a * c_mean + p.b * std::conj(c_mean) + us.coeffs[0];
  GridField f = from_spectral(fs, c_mean, d);

  SolveReport report;
  report.method = "changevar/" + to_string(cv.path);
  report.residual_history.push_back(cc_residual(p, f, u));
  report.converged = true;
  report.finalize();
  return {std::move(f), std::move(report)};
}

}  // namespace beltrami
