#include "beltrami/autonomous.hpp"

#include <cstdio>
#include <limits>

#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/parallel.hpp"
#include "beltrami/picard.hpp"

namespace beltrami {

namespace detail {

SolveResult picard_solve(const GridSpec& spec, const PointwiseRhs& rhs, const PicardOptions& opt) {
  if (opt.max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "damping must lie in (0, 1]");
  const std::size_t len = spec.size();
  const cplx c = opt.c_mean;

  auto evaluate = [&](const GridField& phi) {
    const GridField s = beurling(remove_mean(phi));
    std::vector<cplx> w;
    if (opt.needs_w) w = antiderivative_zbar(phi, c).total_values();
    std::vector<cplx> out(len);
    parallel_for(len, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) out[k] = rhs(k, opt.needs_w ? w[k] : cplx{}, c + s.periodic(k));
    });
    return GridField(spec, {}, {}, std::move(out));
  };

  // Start from f = c z, f_z = c.
  std::vector<cplx> start(len);
  for (std::size_t k = 0; k < len; ++k) start[k] = rhs(k, c * spec.point(k), c);
  GridField phi(spec, {}, {}, std::move(start));

  SolveReport report;
  report.method = opt.method;
  GridField best = phi;
  double best_r = std::numeric_limits<double>::infinity();
  const double target_r = opt.tol * opt.residual_scale;
  for (int it = 0; it < opt.max_iter; ++it) {
    GridField target = evaluate(phi);
    const double r = lp_norm(phi - target, 2.0);
    report.residual_history.push_back(r);
    if (r < best_r) {
      best_r = r;
      best = phi;
    }
    if (r <= target_r) {
      report.converged = true;
      break;
    }
    if (opt.damping == 1.0) {
      phi = std::move(target);
    } else {
      phi = cplx(1.0 - opt.damping) * phi + cplx(opt.damping) * target;
    }
  }
  report.finalize();
  return {antiderivative_zbar(best, c), std::move(report)};
}

}  // namespace detail

SolveResult solve_autonomous(const AutonomousMap& A, const GridField& h, cplx c_mean, const AutonomousOptions& opt) {
  if (!(A.k() < 1.0)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "ellipticity violated: k = %g ≥ 1", A.k());
    throw Error(ErrorCode::EllipticityViolated, buf);
  }
  if (h.has_affine_part()) throw Error(ErrorCode::InvalidArgument, "forcing h must have a zero affine part");

  const double estimate = estimate_lipschitz(A, opt.audit_samples, opt.audit_radius, opt.seed);
  std::string warning;
  if (estimate > A.k() + 1e-6) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "declared k = %g is below the sampled Lipschitz estimate %.9g", A.k(), estimate);
    throw Error(ErrorCode::LipschitzAudit, buf);
  }
  if (estimate > A.k()) warning = "sampled Lipschitz estimate exceeds declared k by less than 1e-6";

  detail::PicardOptions po;
  po.c_mean = c_mean;
  po.tol = opt.tol;
  po.residual_scale = std::max(1.0, lp_norm(h, 2.0, true));
  po.max_iter = opt.max_iter;
  po.method = "autonomous";
  const auto hv = h.values();
  SolveResult res = detail::picard_solve(
      h.spec(), [&](std::size_t idx, cplx, cplx zeta) { return A(zeta) + hv[idx]; }, po);
  res.report.warning = warning;
  return res;
}

double residual(const AutonomousMap& A, const GridField& f, const GridField& h) {
  require_same_spec(f, h);
  const DerivedPair df = derivatives(f);
  std::vector<cplx> r(f.spec().size());
  for (std::size_t k = 0; k < r.size(); ++k)
    r[k] = df.dzbar.periodic(k) - A(df.dz.periodic(k)) - h.total(k);
  return lp_norm(GridField(f.spec(), {}, {}, std::move(r)), 2.0);
}

}  // namespace beltrami
