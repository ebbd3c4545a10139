#include "beltrami/nonlinear_full.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/picard.hpp"
#include "beltrami/rng.hpp"

namespace beltrami {

FullMap FullMap::from_autonomous(const AutonomousMap& A) {
  FullMap H;
  H.eval = [A](cplx, cplx, cplx zeta) { return A(zeta); };
  H.k = A.k();
  if (const auto& l = A.linear_at_infinity()) H.structure = FullStructure{l->a, l->b, l->alpha, l->C, 0.0, {}};
  return H;
}

FullMap FullMap::from_spec(const MapSpec& spec, double period) {
  const AutonomousMap base = spec.base;
  const std::vector<MapTerm> terms = spec.terms;
  const double w = 2.0 * std::numbers::pi / period;
  FullMap H;
  H.k = base.k();
  H.eval = [base, terms, w](cplx z, cplx f, cplx zeta) {
    cplx v = base(zeta);
    for (const MapTerm& t : terms) {
      if (t.kind == MapTerm::Kind::ZTerm)
        v += t.amplitude * std::sin(w * (t.k1 * z.real() + t.k2 * z.imag()));
      else
        v += t.amplitude * f / (1.0 + std::abs(f));
    }
    return v;
  };
  return H;
}

namespace {

double log_uniform(Rng& rng, double lo, double hi) { return lo * std::pow(hi / lo, rng.uniform()); }

cplx random_polar(Rng& rng, double lo, double hi) {
  return std::polar(log_uniform(rng, lo, hi), 2.0 * std::numbers::pi * rng.uniform());
}

struct BoundSample {
  double x;  // |zeta|^alpha
  double y;  // |w|^(2 alpha)
  double r;  // |U| - u(z)
};

// Smallest A + B with A x_i + B y_i >= r_i, A, B >= 0. The optimal A for a
// given B is a max of affine functions of B, so A(B) + B is convex.
std::pair<double, double> fit_bound(const std::vector<BoundSample>& s) {
  auto a_of = [&](double B) {
    double A = 0.0;
    for (const auto& q : s) {
      const double need = q.r - B * q.y;
      if (need <= 0.0) continue;
      A = q.x > 0.0 ? std::max(A, need / q.x) : std::numeric_limits<double>::infinity();
    }
    return A;
  };
  double hi = 0.0;
  for (const auto& q : s)
    if (q.y > 0.0 && q.r > 0.0) hi = std::max(hi, q.r / q.y);
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (a_of(m1) + m1 <= a_of(m2) + m2)
      hi = m2;
    else
      lo = m1;
  }
  const double B = 0.5 * (lo + hi);
  // Snap to the pure-A vertex when B = 0 is as good.
  if (a_of(0.0) <= a_of(B) + B) return {a_of(0.0), 0.0};
  return {a_of(B), B};
}

}  // namespace

ConditionReport check_conditions(const FullMap& H, int samples, const ConditionOptions& opt) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "check_conditions requires samples >= 1");
  if (!H.eval) throw Error(ErrorCode::InvalidArgument, "full map has no evaluation function");
  const GridSpec grid = GridSpec::make(opt.grid.n, opt.grid.period);
  Rng rng(opt.seed);

  ConditionReport rep;
  rep.samples = samples;
  rep.lipschitz_violation = -std::numeric_limits<double>::infinity();
  rep.structure_violation = -std::numeric_limits<double>::infinity();

  cplx a{}, b{};
  double alpha = 0.99;
  const GridField* u = nullptr;
  if (H.structure) {
    rep.structure_declared = true;
    a = H.structure->a;
    b = H.structure->b;
    alpha = H.structure->alpha;
    if (H.structure->u_field) {
      if (!(H.structure->u_field->spec() == grid))
        throw Error(ErrorCode::SpecMismatch, "u_field must be sampled on the condition grid");
      u = &*H.structure->u_field;
    }
  }
  rep.alpha_used = alpha;

  std::vector<BoundSample> bound;
  bound.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const std::size_t idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(grid.size()) - 1));
    const cplx z = grid.point(idx);
    const cplx w = random_polar(rng, 1e-3, opt.w_max);
    const cplx zeta = random_polar(rng, 1e-6, opt.zeta_max);
    cplx eta;
    if (s % 2 == 0)
      eta = random_polar(rng, 1e-6, opt.zeta_max);
    else
      eta = zeta + std::polar(1e-6 * std::max(1.0, std::abs(zeta)), 2.0 * std::numbers::pi * rng.uniform());

    const cplx hz = H(z, w, zeta);
    const double dist = std::abs(zeta - eta);
    if (dist > 0.0) {
      const double diff = std::abs(hz - H(z, w, eta));
      rep.lipschitz_violation = std::max(rep.lipschitz_violation, diff - H.k * dist);
      rep.lipschitz_estimate = std::max(rep.lipschitz_estimate, diff / dist);
    }
    rep.zero_violation = std::max(rep.zero_violation, std::abs(H(z, w, cplx{})));

    const double uz = u ? std::abs(u->periodic(idx)) : 0.0;
    const double U = std::abs(hz - a * zeta - b * std::conj(zeta));
    const double x = std::pow(std::abs(zeta), alpha), y = std::pow(std::abs(w), 2.0 * alpha);
    bound.push_back({x, y, U - uz});
    if (H.structure) {
      const double lim = H.structure->A * x + H.structure->B * y + uz;
      rep.structure_violation = std::max(rep.structure_violation, U - lim);
    }
  }
  std::tie(rep.fitted_A, rep.fitted_B) = fit_bound(bound);
  if (!H.structure) rep.structure_violation = 0.0;
  return rep;
}

SolveResult solve_full(const FullMap& H, const GridSpec& spec, cplx c_mean, double tol, int max_iter,
                       double damping) {
  if (!(H.k < 1.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ellipticity violated: k = %g ≥ 1", H.k);
    throw Error(ErrorCode::EllipticityViolated, buf);
  }
  detail::PicardOptions po;
  po.c_mean = c_mean;
  po.tol = tol;
  po.residual_scale = 1.0;
  po.max_iter = max_iter;
  po.damping = damping;
  po.needs_w = true;
  po.method = "full-picard";
  return detail::picard_solve(
      spec, [&](std::size_t idx, cplx w, cplx zeta) { return H(spec.point(idx), w, zeta); }, po);
}

double full_residual(const FullMap& H, const GridField& f) {
  const DerivedPair df = derivatives(f);
  std::vector<cplx> r(f.spec().size());
  for (std::size_t k = 0; k < r.size(); ++k)
    r[k] = df.dzbar.periodic(k) - H(f.spec().point(k), f.total(k), df.dz.periodic(k));
  return lp_norm(GridField(f.spec(), {}, {}, std::move(r)), 2.0);
}

}  // namespace beltrami
