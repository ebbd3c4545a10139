#include "beltrami/beltrami.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "beltrami/analysis.hpp"
#include "beltrami/autonomous.hpp"
#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/linear_solve.hpp"
#include "beltrami/maps.hpp"
#include "beltrami/nonlinear_full.hpp"
#include "beltrami/report_io.hpp"

using namespace beltrami;

struct bt_field {
  GridField f;
};
struct bt_map {
  MapSpec spec;
};
struct bt_report {
  SolveReport r;
};
struct bt_regularity {
  RegularityReport r;
  int stable_below = -1;
};

namespace {

thread_local std::string g_last_error;

bt_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return BT_ERR_INVALID_ARGUMENT;
    case ErrorCode::EllipticityViolated: return BT_ERR_ELLIPTICITY;
    case ErrorCode::SpecMismatch: return BT_ERR_SPEC_MISMATCH;
    case ErrorCode::MalformedFile: return BT_ERR_MALFORMED_FILE;
    case ErrorCode::SampleCountMismatch: return BT_ERR_SAMPLE_COUNT;
    case ErrorCode::NonFiniteValue: return BT_ERR_NON_FINITE;
    case ErrorCode::ShearResampling: return BT_ERR_SHEAR_RESAMPLING;
    case ErrorCode::LipschitzAudit: return BT_ERR_LIPSCHITZ_AUDIT;
    case ErrorCode::InsufficientLevels: return BT_ERR_INSUFFICIENT_LEVELS;
    case ErrorCode::Io: return BT_ERR_IO;
    case ErrorCode::MapGrammar: return BT_ERR_GRAMMAR;
  }
  return BT_ERR_INTERNAL;
}

template <typename Fn>
bt_status try_(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BT_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw Error(ErrorCode::InvalidArgument, what);
}

template <typename T>
void require_ptr(const T* p, const char* name) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(name) + " is null");
}

bt_field* wrap(GridField f) { return new bt_field{std::move(f)}; }

cplx c2(const double v[2]) { return {v[0], v[1]}; }
void put(double out[2], cplx v) {
  out[0] = v.real();
  out[1] = v.imag();
}

SampleMask mask_of(const uint8_t* mask, const GridSpec& spec) {
  if (!mask) return {};
  return SampleMask(mask, mask + spec.size());
}

SolveResult run_solve(const MapSpec& spec, const GridField* h, const GridSpec& grid, const bt_solve_options& o) {
  const cplx c(o.c_mean[0], o.c_mean[1]);
  if (spec.linear_coefficients) CCParams{spec.linear_coefficients->first, spec.linear_coefficients->second}.validate();
  if (spec.autonomous()) {
    AutonomousOptions ao;
    ao.tol = o.tol;
    ao.max_iter = o.max_iter;
    ao.seed = o.seed;
    if (h && !(h->spec() == grid)) throw Error(ErrorCode::SpecMismatch, "forcing h is not sampled on the requested grid");
    return solve_autonomous(spec.base, h ? *h : GridField::zeros(grid), c, ao);
  }
  if (h) throw Error(ErrorCode::InvalidArgument, "forcing h is only supported for autonomous maps");
  return solve_full(FullMap::from_spec(spec, grid.period), grid, c, o.tol, o.max_iter, o.damping);
}

}  // namespace

extern "C" {

const char* bt_last_error(void) { return g_last_error.c_str(); }
const char* bt_version(void) { return "1.0.0"; }

// ---- fields ----------------------------------------------------------------

bt_status bt_field_create(int n, double period, double c_re, double c_im, double d_re, double d_im,
                          const double* samples, bt_field** out) {
  return try_([&] {
    require_ptr(out, "out");
    const GridSpec spec = GridSpec::make(n, period);
    std::vector<cplx> v(spec.size());
    if (samples)
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = {samples[2 * k], samples[2 * k + 1]};
    for (double x : {c_re, c_im, d_re, d_im})
      if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "affine coefficient is not finite");
    for (std::size_t k = 0; k < v.size(); ++k)
      if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag()))
        throw Error(ErrorCode::NonFiniteValue, "sample " + std::to_string(k) + " is not finite");
    *out = wrap(GridField(spec, {c_re, c_im}, {d_re, d_im}, std::move(v)));
  });
}

bt_status bt_field_from_forcing(const char* text, int n, double period, bt_field** out) {
  return try_([&] {
    require_ptr(text, "text");
    require_ptr(out, "out");
    *out = wrap(sample_forcing(text, GridSpec::make(n, period)));
  });
}

bt_status bt_field_read(const char* path, bt_field** out) {
  return try_([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    *out = wrap(read_field(path));
  });
}

bt_status bt_field_write(const bt_field* f, const char* path) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(path, "path");
    write_field(f->f, path);
  });
}

bt_status bt_field_clone(const bt_field* f, bt_field** out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    *out = wrap(f->f);
  });
}

void bt_field_free(bt_field* f) { delete f; }

int bt_field_n(const bt_field* f) { return f ? f->f.spec().n : 0; }
double bt_field_period(const bt_field* f) { return f ? f->f.spec().period : 0.0; }

void bt_field_affine(const bt_field* f, double affine[4]) {
  if (!f || !affine) return;
  affine[0] = f->f.c().real();
  affine[1] = f->f.c().imag();
  affine[2] = f->f.d().real();
  affine[3] = f->f.d().imag();
}

bt_status bt_field_samples(const bt_field* f, double* out, size_t capacity) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    const auto v = f->f.values();
    require(capacity >= 2 * v.size(), "output buffer too small");
    for (std::size_t k = 0; k < v.size(); ++k) {
      out[2 * k] = v[k].real();
      out[2 * k + 1] = v[k].imag();
    }
  });
}

bt_status bt_field_lp_norm(const bt_field* f, double p, int periodic_only, double* out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    *out = lp_norm(f->f, p, periodic_only != 0);
  });
}

bt_status bt_field_dz(const bt_field* f, bt_field** out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    *out = wrap(d_z(f->f));
  });
}

bt_status bt_field_dzbar(const bt_field* f, bt_field** out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    *out = wrap(d_zbar(f->f));
  });
}

bt_status bt_field_beurling(const bt_field* f, bt_field** out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    *out = wrap(beurling(f->f));
  });
}

bt_status bt_field_antiderivative_zbar(const bt_field* phi, double c_re, double c_im, bt_field** out) {
  return try_([&] {
    require_ptr(phi, "field");
    require_ptr(out, "out");
    *out = wrap(antiderivative_zbar(phi->f, {c_re, c_im}));
  });
}

bt_status bt_field_derivative_distance(const bt_field* f, const bt_field* g, double* out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(g, "field");
    require_ptr(out, "out");
    require_same_spec(f->f, g->f);
    const DerivedPair a = derivatives(f->f), b = derivatives(g->f);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < f->f.spec().size(); ++k) {
      num += std::norm(a.dz.periodic(k) - b.dz.periodic(k)) + std::norm(a.dzbar.periodic(k) - b.dzbar.periodic(k));
      den += std::norm(b.dz.periodic(k)) + std::norm(b.dzbar.periodic(k));
    }
    *out = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  });
}

// ---- maps --------------------------------------------------------------------

bt_status bt_map_parse(const char* text, bt_map** out) {
  return try_([&] {
    require_ptr(text, "text");
    require_ptr(out, "out");
    *out = new bt_map{parse_map(text)};
  });
}

void bt_map_free(bt_map* m) { delete m; }
int bt_map_is_autonomous(const bt_map* m) { return m && m->spec.autonomous() ? 1 : 0; }
double bt_map_k(const bt_map* m) { return m ? m->spec.base.k() : 0.0; }

bt_status bt_map_eval(const bt_map* m, double z_re, double z_im, double w_re, double w_im, double zeta_re,
                      double zeta_im, double out[2]) {
  return try_([&] {
    require_ptr(m, "map");
    require_ptr(out, "out");
    const FullMap H = FullMap::from_spec(m->spec, 2.0 * std::numbers::pi);
    put(out, H({z_re, z_im}, {w_re, w_im}, {zeta_re, zeta_im}));
  });
}

bt_status bt_map_estimate_lipschitz(const bt_map* m, int samples, double radius, uint64_t seed, double* out) {
  return try_([&] {
    require_ptr(m, "map");
    require_ptr(out, "out");
    require(m->spec.autonomous(), "Lipschitz estimate needs an autonomous map");
    *out = estimate_lipschitz(m->spec.base, samples, radius, seed);
  });
}

bt_status bt_map_fit_linear_part(const bt_map* m, const double* radii, size_t count, bt_linear_fit* out) {
  return try_([&] {
    require_ptr(m, "map");
    require_ptr(radii, "radii");
    require_ptr(out, "out");
    require(m->spec.autonomous(), "linear fit needs an autonomous map");
    const LinearFit fit = fit_linear_part(m->spec.base, std::vector<double>(radii, radii + count));
    put(out->a, fit.a);
    put(out->b, fit.b);
    out->alpha = fit.alpha;
    out->C = fit.C;
    out->ok = fit.ok ? 1 : 0;
  });
}

bt_status bt_map_check_conditions(const bt_map* m, int samples, double period, uint64_t seed, bt_conditions* out) {
  return try_([&] {
    require_ptr(m, "map");
    require_ptr(out, "out");
    ConditionOptions opt;
    opt.grid = GridSpec::make(16, period);
    opt.seed = seed;
    const ConditionReport r = check_conditions(FullMap::from_spec(m->spec, period), samples, opt);
    *out = {r.samples,
            r.lipschitz_violation,
            r.lipschitz_estimate,
            r.zero_violation,
            r.structure_violation,
            r.fitted_A,
            r.fitted_B,
            r.alpha_used,
            r.structure_declared ? 1 : 0,
            r.measurability_assumed ? 1 : 0,
            r.passed() ? 1 : 0};
  });
}

// ---- solvers -----------------------------------------------------------------

void bt_solve_options_default(bt_solve_options* opt) {
  if (!opt) return;
  opt->c_mean[0] = 1.0;
  opt->c_mean[1] = 0.0;
  opt->tol = 1e-10;
  opt->max_iter = 1000;
  opt->damping = 1.0;
  opt->seed = 1;
}

bt_status bt_solve(const bt_map* m, const bt_field* h, int n, double period, const bt_solve_options* opt,
                   bt_field** solution, bt_report** report) {
  return try_([&] {
    require_ptr(m, "map");
    require_ptr(opt, "options");
    require_ptr(solution, "solution");
    const GridSpec grid = GridSpec::make(n, period);
    SolveResult res = run_solve(m->spec, h ? &h->f : nullptr, grid, *opt);
    *solution = wrap(std::move(res.solution));
    if (report) *report = new bt_report{std::move(res.report)};
  });
}

bt_status bt_solve_linear(const double a[2], const double b[2], const bt_field* u, bt_linear_method method,
                          const bt_solve_options* opt, bt_field** solution, bt_report** report) {
  return try_([&] {
    require_ptr(a, "a");
    require_ptr(b, "b");
    require_ptr(u, "u");
    require_ptr(opt, "options");
    require_ptr(solution, "solution");
    require(method == BT_LINEAR_NEUMANN || method == BT_LINEAR_CHANGEVAR, "unknown linear solver method");
    const CCParams p{c2(a), c2(b)};
    const cplx c(opt->c_mean[0], opt->c_mean[1]);
    SolveResult res = method == BT_LINEAR_CHANGEVAR ? solve_cc_changevar(p, u->f, c)
                                                    : solve_cc_neumann(p, u->f, c, opt->tol, opt->max_iter);
    *solution = wrap(std::move(res.solution));
    if (report) *report = new bt_report{std::move(res.report)};
  });
}

bt_status bt_residual(const bt_map* m, const bt_field* f, const bt_field* h, double* out) {
  return try_([&] {
    require_ptr(m, "map");
    require_ptr(f, "field");
    require_ptr(out, "out");
    if (m->spec.autonomous())
      *out = residual(m->spec.base, f->f, h ? h->f : GridField::zeros(f->f.spec()));
    else {
      require(h == nullptr, "forcing h is only supported for autonomous maps");
      *out = full_residual(FullMap::from_spec(m->spec, f->f.spec().period), f->f);
    }
  });
}

void bt_report_free(bt_report* r) { delete r; }
int bt_report_iterations(const bt_report* r) { return r ? r->r.iterations : 0; }
int bt_report_converged(const bt_report* r) { return r && r->r.converged ? 1 : 0; }
double bt_report_final_residual(const bt_report* r) { return r ? r->r.final_residual : 0.0; }
double bt_report_contraction_ratio(const bt_report* r) { return r ? r->r.contraction_ratio : 0.0; }
const char* bt_report_method(const bt_report* r) { return r ? r->r.method.c_str() : ""; }
const char* bt_report_warning(const bt_report* r) { return r ? r->r.warning.c_str() : ""; }

size_t bt_report_history(const bt_report* r, double* out, size_t capacity) {
  if (!r) return 0;
  const auto& h = r->r.residual_history;
  for (std::size_t i = 0; out && i < h.size() && i < capacity; ++i) out[i] = h[i];
  return h.size();
}

bt_status bt_report_write_csv(const bt_report* r, const char* history_path, const char* summary_path) {
  return try_([&] {
    require_ptr(r, "report");
    if (history_path) write_text(history_path, solve_history_csv(r->r));
    if (summary_path) write_text(summary_path, solve_summary_csv(r->r));
  });
}

// ---- change of variables -----------------------------------------------------

bt_status bt_verify_transform(const double a[2], const double b[2], int trials, uint64_t seed, bt_transform* out) {
  return try_([&] {
    require_ptr(a, "a");
    require_ptr(b, "b");
    require_ptr(out, "out");
    require(trials >= 1, "trials must be >= 1");
    const CCParams p{c2(a), c2(b)};
    const ChangeOfVars cv = compute_mu_nu(p);
    const TransformResidual res = verify_transform(p, cv, trials, seed);
    put(out->mu, cv.mu);
    put(out->nu, cv.nu);
    out->numeric_root = cv.path == MuNuPath::NumericRoot ? 1 : 0;
    put(out->printed_mu, cv.printed_mu);
    put(out->printed_nu, cv.printed_nu);
    out->residual = res.induced;
    out->literal_residual = res.literal;
    put(out->induced_coefficient, res.induced_coefficient);
    out->mu_bound_excess = std::abs(cv.mu) * (1.0 - std::norm(p.b)) - std::abs(p.a);
    out->nu_bound_excess = std::abs(cv.nu) * (1.0 - std::norm(p.a)) - std::abs(p.b);
  });
}

// ---- analysis ------------------------------------------------------------------

bt_status bt_distortion_field(const bt_field* f, bt_field** out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    *out = wrap(distortion_field(f->f));
  });
}

bt_status bt_distortion_stats(const bt_field* f, const uint8_t* mask, bt_distortion* out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    const DistortionStats s = distortion_stats(distortion_field(f->f), mask_of(mask, f->f.spec()));
    out->max = s.max;
    for (std::size_t i = 0; i < 4; ++i) out->quantiles[i] = s.quantiles[i];
    out->degenerate = s.degenerate;
    out->counted = s.counted;
  });
}

bt_status bt_forcing_free_mask(const bt_field* h, double relative, uint8_t* out, size_t capacity) {
  return try_([&] {
    require_ptr(h, "field");
    require_ptr(out, "out");
    const auto m = forcing_free_mask(h->f, relative);
    require(capacity >= m.size(), "output buffer too small");
    std::memcpy(out, m.data(), m.size());
  });
}

bt_status bt_probe_fields(const bt_field* const* ladder, size_t levels, const double* p_grid, size_t np,
                          int second_order, double k, bt_regularity** out) {
  return try_([&] {
    require_ptr(ladder, "ladder");
    require_ptr(p_grid, "p_grid");
    require_ptr(out, "out");
    std::vector<GridField> fields;
    for (std::size_t i = 0; i < levels; ++i) {
      require_ptr(ladder[i], "ladder entry");
      fields.push_back(ladder[i]->f);
    }
    const std::vector<double> ps(p_grid, p_grid + np);
    if (second_order) {
      SecondOrderReport r = second_order_probe(fields, k, ps);
      *out = new bt_regularity{std::move(r.probe), r.stable_below_threshold ? 1 : 0};
    } else {
      *out = new bt_regularity{sobolev_probe(fields, ps), -1};
    }
  });
}

bt_status bt_probe_radial(int n0, size_t levels, double period, double K, const double* p_grid, size_t np,
                          bt_regularity** out) {
  return try_([&] {
    require_ptr(p_grid, "p_grid");
    require_ptr(out, "out");
    std::vector<DerivedPair> pairs;
    for (std::size_t i = 0; i < levels; ++i) pairs.push_back(radial_extremal_pair(GridSpec::make(n0 << i, period), K));
    *out = new bt_regularity{sobolev_probe(pairs, std::vector<double>(p_grid, p_grid + np)), -1};
  });
}

void bt_regularity_free(bt_regularity* r) { delete r; }
double bt_regularity_p_critical(const bt_regularity* r) { return r ? r->r.p_critical : 0.0; }
double bt_regularity_fit_r2(const bt_regularity* r) { return r ? r->r.fit_r2 : 0.0; }
double bt_regularity_p_tail(const bt_regularity* r) { return r ? r->r.p_tail : 0.0; }
double bt_regularity_distortion_max(const bt_regularity* r) { return r ? r->r.distortion_max : 0.0; }
int bt_regularity_stable_below_threshold(const bt_regularity* r) { return r ? r->stable_below : -1; }

int bt_regularity_all_stable(const bt_regularity* r) {
  if (!r) return 0;
  for (auto s : r->r.stable)
    if (!s) return 0;
  return 1;
}

bt_status bt_regularity_write_csv(const bt_regularity* r, const char* path) {
  return try_([&] {
    require_ptr(r, "report");
    require_ptr(path, "path");
    write_text(path, regularity_csv(r->r));
  });
}

bt_status bt_coefficients_analyze(const bt_field* f, double k, const uint8_t* mask, bt_coefficients* out,
                                  bt_field** mu, bt_field** nu) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(out, "out");
    const SampleMask m = mask_of(mask, f->f.spec());
    const auto [fx, fy] = directional_derivatives(f->f);
    CoefficientFields c = recover_coefficients(fx, fy, k);
    const CoefficientStats st = coefficient_stats(c, m);
    const GradientCheck g = gradient_equation_check(f->f, c, m);
    const DirectionalDistortion dd = directional_distortion(f->f, 16, m);
    *out = {st.max_sum, st.used, c.flagged, g.residual, g.k_prime, dd.max, dd.degenerate};
    if (mu) *mu = wrap(c.mu);
    if (nu) *nu = wrap(c.nu);
  });
}

bt_status bt_hodograph_check(const bt_field* f, const bt_map* m, int samples, double jacobian_min,
                             const uint8_t* mask, uint64_t seed, bt_hodograph* out) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(m, "map");
    require_ptr(out, "out");
    require(m->spec.autonomous(), "hodograph check needs an autonomous map");
    HodographOptions opt;
    opt.jacobian_min = jacobian_min;
    opt.mask = mask_of(mask, f->f.spec());
    opt.seed = seed;
    const HodographResult r = hodograph_check(f->f, m->spec.base, samples, opt);
    *out = {r.residual, r.printed_residual, r.max_ratio, r.accepted, r.skipped};
  });
}

bt_status bt_write_dz_graymap(const bt_field* f, const char* path, double range[2]) {
  return try_([&] {
    require_ptr(f, "field");
    require_ptr(path, "path");
    const GridField fz = d_z(f->f);
    std::vector<double> mag(fz.spec().size());
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(fz.periodic(k));
    GraymapScale scale;
    write_text(path, graymap(mag, fz.spec().n, &scale));
    if (range) {
      range[0] = scale.min;
      range[1] = scale.max;
    }
  });
}

}  // extern "C"
