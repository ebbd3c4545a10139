#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/linear_solve.hpp"
#include "beltrami/rng.hpp"

using namespace beltrami;

namespace {
constexpr double kL = 2.0 * std::numbers::pi;
const cplx I(0, 1);

double rel_err(const GridField& f, const GridField& ref) {
  double num = std::norm(f.c() - ref.c()) + std::norm(f.d() - ref.d()), den = std::norm(ref.c()) + std::norm(ref.d());
  for (std::size_t k = 0; k < f.spec().size(); ++k) {
    num += std::norm(f.periodic(k) - ref.periodic(k));
    den += std::norm(ref.periodic(k));
  }
  return std::sqrt(num / den);
}

// f* = z + 0.1 exp(i x) and u := f*_zbar - a f*_z - b conj(f*_z).
std::pair<GridField, GridField> manufactured(const GridSpec& s, cplx a, cplx b) {
  const GridField p = sample_field(s, [](cplx z) { return 0.1 * std::exp(I * z.real()); });
  const GridField fstar = p.with_affine(1.0, 0.0);
  const DerivedPair d = derivatives(fstar);
  return {fstar, d.dzbar - a * d.dz - b * conj(d.dz)};
}
}  // namespace

TEST_CASE("ellipticity is enforced") {
  const GridSpec s = GridSpec::make(16);
  try {
    solve_cc_neumann({2.0, 0.0}, GridField::zeros(s), 1.0, 1e-10, 10);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EllipticityViolated);
    CHECK(std::string(e.what()) == "ellipticity violated: |a|+|b| = 2 ≥ 1");
  }
  CHECK_THROWS_AS(solve_cc_changevar({0.5, 0.5}, GridField::zeros(s), 1.0), Error);
  CHECK_THROWS_AS(compute_mu_nu({0.6, 0.5}), Error);
  CHECK_NOTHROW(CCParams{{0.3, 0.4}, {0.49, 0.0}}.validate());
}

TEST_CASE("neumann: Cauchy-Riemann case gives f(z) = z in one iteration") {
  const GridSpec s = GridSpec::make(32);
  const SolveResult r = solve_cc_neumann({0, 0}, GridField::zeros(s), 1.0, 1e-12, 100);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  CHECK(r.solution.c() == cplx(1, 0));
  CHECK(r.solution.d() == cplx(0, 0));
  CHECK(lp_norm(r.solution, 2, true) == 0.0);
}

TEST_CASE("neumann: manufactured solution a = 0.5") {
  const GridSpec s = GridSpec::make(64);
  const auto [fstar, u] = manufactured(s, 0.5, 0.0);
  const SolveResult r = solve_cc_neumann({0.5, 0.0}, u, 1.0, 1e-13, 500);
  CHECK(r.report.converged);
  CHECK(rel_err(r.solution, fstar) <= 1e-8);
  CHECK(cc_residual({0.5, 0.0}, r.solution, u) <= 1e-12);
}

TEST_CASE("neumann: contraction ratio bounded by |a| + |b|") {
  const GridSpec s = GridSpec::make(64);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GridField u = TrigPolynomial::random(kL, 8, 1.0, seed).sample(s);
    const SolveResult r = solve_cc_neumann({0.45, 0.0}, u, 1.0, 1e-10, 1000);
    CHECK(r.report.converged);
    CHECK(r.report.contraction_ratio <= 0.9 + 0.02);
    CHECK(r.report.final_residual == r.report.residual_history.back());
  }
}

TEST_CASE("neumann: non-convergence returns the best iterate and a flag") {
  const GridSpec s = GridSpec::make(32);
  const GridField u = TrigPolynomial::random(kL, 8, 1.0, 2).sample(s);
  const SolveResult r = solve_cc_neumann({0.6, 0.3}, u, 1.0, 1e-14, 3);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations == 3);
  CHECK(cc_residual({0.6, 0.3}, r.solution, u) > 1e-14);
}

TEST_CASE("compute_mu_nu: trivial case") {
  const ChangeOfVars cv = compute_mu_nu({0, 0});
  CHECK(cv.mu == cplx(0, 0));
  CHECK(cv.nu == cplx(0, 0));
  CHECK(verify_transform({0, 0}, cv, 3).induced < 1e-12);
}

TEST_CASE("compute_mu_nu: a = 0.5 rejects the printed value") {
  const CCParams p{0.5, 0.0};
  const ChangeOfVars cv = compute_mu_nu(p);
  CHECK(cv.printed_mu.real() == doctest::Approx(-1.0 / (1.25 + std::sqrt(1.25))).epsilon(1e-12));
  CHECK(cv.printed_mu.real() == doctest::Approx(-0.42229).epsilon(1e-4));
  CHECK(cv.path == MuNuPath::NumericRoot);
  CHECK_FALSE(cv.printed_residual <= 1e-8);
  CHECK(std::abs(cv.mu - cplx(-0.5, 0)) < 1e-12);
  CHECK(cv.nu == cplx(0, 0));
  const TransformResidual r = verify_transform(p, cv, 3);
  CHECK(r.induced <= 1e-8);
  CHECK(r.literal <= 1e-8);  // ab = 0 here
}

TEST_CASE("compute_mu_nu: a = 0.3 + 0.1i, b = 0.2") {
  const CCParams p{{0.3, 0.1}, 0.2};
  const ChangeOfVars cv = compute_mu_nu(p);
  const TransformResidual r = verify_transform(p, cv, 3);
  CHECK(r.induced <= 1e-9);
  CHECK(std::abs(r.induced_coefficient - cv.mu * cv.nu) < 1e-15);
  CHECK(std::abs(cv.mu) < 1.0);
  CHECK(std::abs(cv.nu) < 1.0);
  // defining system
  CHECK(std::abs(cv.mu * (1.0 + cv.nu * std::conj(p.b)) + p.a) < 1e-12);
  CHECK(std::abs(cv.nu * (1.0 + cv.mu * std::conj(p.a)) + p.b) < 1e-12);
}

TEST_CASE("numeric root is symmetric in (a, b)") {
  const auto [mu, nu] = numeric_mu_nu({{0.2, -0.1}, {0.35, 0.2}});
  const auto [mu2, nu2] = numeric_mu_nu({{0.35, 0.2}, {0.2, -0.1}});
  CHECK(std::abs(mu - nu2) < 1e-13);
  CHECK(std::abs(nu - mu2) < 1e-13);
}

TEST_CASE("verify_transform negative control") {
  CHECK(verify_transform({0.5, 0.0}, cplx(0.9, 0.0), cplx(0.0, 0.0), 2).induced > 1e-2);
  CHECK_THROWS_AS(verify_transform({0.5, 0.0}, cplx(-0.5), cplx(0.0), 0), Error);
}

TEST_CASE("compute_mu_nu: stated bounds over the ellipticity ball" * doctest::should_fail()) {
  // The stated bounds |mu|(1-|b|^2) <= |a| and |nu|(1-|a|^2) <= |b| fail
  // whenever ab != 0 for the (mu, nu) that make the substitution work.
  Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    const cplx a = rng.in_disk(0.5), b = rng.in_disk(0.45);
    const ChangeOfVars cv = compute_mu_nu({a, b});
    CHECK(std::abs(cv.mu) * (1.0 - std::norm(b)) <= std::abs(a) + 1e-12);
    CHECK(std::abs(cv.nu) * (1.0 - std::norm(a)) <= std::abs(b) + 1e-12);
  }
}

TEST_CASE("transformed equation with the literal coefficient ab" * doctest::should_fail()) {
  const CCParams p{{0.3, 0.1}, 0.2};
  CHECK(verify_transform(p, compute_mu_nu(p), 3).literal <= 1e-8);
}

TEST_CASE("changevar: degenerate transform is one antiderivative") {
  const GridSpec s = GridSpec::make(32);
  const GridField u = TrigPolynomial::random(kL, 6, 1.0, 4).sample(s) + GridField::constant(s, 0.2);
  const SolveResult r = solve_cc_changevar({0, 0}, u, {1.0, 0.5});
  const GridField ref = antiderivative_zbar(u, {1.0, 0.5});
  CHECK(rel_err(r.solution, ref) < 1e-14);
  CHECK(r.report.method.rfind("changevar/", 0) == 0);
}

TEST_CASE("changevar: manufactured solution a = 0.5") {
  const GridSpec s = GridSpec::make(64);
  const auto [fstar, u] = manufactured(s, 0.5, 0.0);
  const SolveResult r = solve_cc_changevar({0.5, 0.0}, u, 1.0);
  CHECK(rel_err(r.solution, fstar) <= 1e-8);
}

TEST_CASE("changevar agrees with neumann") {
  const GridSpec s = GridSpec::make(64);
  Rng rng(31);
  for (int i = 0; i < 5; ++i) {
    const cplx a = rng.in_disk(0.45), b = rng.in_disk(0.45);
    const GridField u = TrigPolynomial::random(kL, 6, 1.0, 50 + i).sample(s);
    const SolveResult n = solve_cc_neumann({a, b}, u, 1.0, 1e-14, 2000);
    const SolveResult c = solve_cc_changevar({a, b}, u, 1.0);
    CHECK(rel_err(c.solution, n.solution) <= 1e-7);
    CHECK(cc_residual({a, b}, c.solution, u) <= 1e-10);
  }
  const GridField u = TrigPolynomial::random(kL, 6, 1.0, 7).sample(s);
  const SolveResult n = solve_cc_neumann({0.3, 0.0}, u, 1.0, 1e-14, 2000);
  const SolveResult c = solve_cc_changevar({0.3, 0.0}, u, 1.0);
  CHECK(rel_err(c.solution, n.solution) <= 1e-7);
  const SolveResult n2 = solve_cc_neumann({0.0, 0.2}, u, 1.0, 1e-14, 2000);
  const SolveResult c2 = solve_cc_changevar({0.0, 0.2}, u, 1.0);
  CHECK(rel_err(c2.solution, n2.solution) <= 1e-7);
}

TEST_CASE("changevar: band-limit failure is reported") {
  const GridSpec s = GridSpec::make(16);
  std::vector<cplx> v(s.size());
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) v[static_cast<std::size_t>(i) * 16 + j] = (i + j) % 2 ? 1.0 : -1.0;
  try {
    solve_cc_changevar({0.3, 0.2}, GridField(s, {}, {}, v), 1.0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShearResampling);
  }
}
