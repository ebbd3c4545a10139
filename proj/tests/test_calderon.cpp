#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/fft.hpp"

using namespace beltrami;

namespace {
constexpr double kL = 2.0 * std::numbers::pi;
const cplx I(0, 1);

double max_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.spec().size(); ++k) m = std::max(m, std::abs(a.periodic(k) - b.periodic(k)));
  return m;
}

GridField wave(const GridSpec& s, int k1, int k2, double L = kL) {
  return sample_field(s, [=](cplx z) { return std::exp(I * (2 * std::numbers::pi / L) * (k1 * z.real() + k2 * z.imag())); });
}
}  // namespace

TEST_CASE("spectral round trip and mean") {
  const GridSpec s = GridSpec::make(32);
  const GridField f = TrigPolynomial::random(kL, 8, 1.0, 3).sample(s) + GridField::constant(s, {0.5, -2});
  const SpectralCoeffs c = to_spectral(f);
  CHECK(std::abs(c.coeffs[0] - f.periodic_mean()) < 1e-14);
  CHECK(max_diff(from_spectral(c), f) < 1e-13);
}

TEST_CASE("wavevector uses signed indices with Nyquist at -n/2") {
  const GridSpec s = GridSpec::make(16, 2.0);
  const SpectralCoeffs c{s, std::vector<cplx>(s.size())};
  CHECK(c.wavevector(1) == cplx(std::numbers::pi, 0));
  CHECK(c.wavevector(16) == cplx(0, std::numbers::pi));
  CHECK(c.wavevector(15).real() == doctest::Approx(-std::numbers::pi));
  CHECK(c.wavevector(8).real() == doctest::Approx(-8 * std::numbers::pi));
  CHECK(c.is_nyquist(8));
  CHECK_FALSE(c.is_nyquist(7));
  CHECK(fft::signed_index(8, 16) == -8);
  CHECK(fft::negated_index(0, 16) == 0);
  CHECK(fft::negated_index(3, 16) == 13);
}

TEST_CASE("d_zbar examples") {
  const GridSpec s = GridSpec::make(32);
  CHECK(max_diff(d_zbar(GridField::zeros(s).with_affine(1, 0)), GridField::zeros(s)) == 0.0);
  CHECK(max_diff(d_zbar(GridField::zeros(s).with_affine(0, 1)), GridField::constant(s, 1)) < 1e-15);
  const GridField e = wave(s, 1, 1);
  const GridField expect = (I * (2 * std::numbers::pi / kL) * (1.0 + I) / 2.0) * e;
  CHECK(max_diff(d_zbar(e), expect) < 1e-13);
  const GridField out = d_zbar(e.with_affine(0.3, 0.7));
  CHECK(out.c() == cplx{});
  CHECK(out.d() == cplx{});
  CHECK(std::abs(out.periodic_mean() - 0.7) < 1e-14);
}

TEST_CASE("d_z examples") {
  const GridSpec s = GridSpec::make(32);
  CHECK(max_diff(d_z(GridField::zeros(s).with_affine(1, 0)), GridField::constant(s, 1)) < 1e-15);
  CHECK(max_diff(d_z(GridField::zeros(s).with_affine(0, 1)), GridField::zeros(s)) == 0.0);
  const GridField e = wave(s, 1, 0);
  CHECK(max_diff(d_z(e), (I * std::numbers::pi / kL) * e) < 1e-13);
}

TEST_CASE("spectral derivatives match centered differences to second order") {
  const TrigPolynomial P = TrigPolynomial::random(kL, 2, 1.0, 5);
  double prev = 0.0;
  for (int n : {64, 128}) {
    const GridSpec s = GridSpec::make(n);
    const GridField f = P.sample(s);
    const double h = s.spacing();
    std::vector<cplx> fd(s.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const cplx fx = (f.periodic(i, (j + 1) % n) - f.periodic(i, (j + n - 1) % n)) / (2 * h);
        const cplx fy = (f.periodic((i + 1) % n, j) - f.periodic((i + n - 1) % n, j)) / (2 * h);
        fd[static_cast<std::size_t>(i) * n + j] = 0.5 * (fx + I * fy);
      }
    const double err = max_diff(d_zbar(f), GridField(s, {}, {}, fd));
    CHECK(err < 5 * h * h);
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("beurling examples") {
  const GridSpec s = GridSpec::make(32);
  CHECK(max_diff(beurling(wave(s, 1, 0)), wave(s, 1, 0)) < 1e-13);
  CHECK(max_diff(beurling(wave(s, 0, 1)), -1.0 * wave(s, 0, 1)) < 1e-13);
  CHECK(max_diff(beurling(GridField::constant(s, 3.0)), GridField::zeros(s)) < 1e-15);
  CHECK_THROWS_AS(beurling(GridField::zeros(s).with_affine(1, 0)), Error);
}

TEST_CASE("beurling is an L2 isometry on mean-zero fields") {
  const GridSpec s = GridSpec::make(64);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GridField phi = TrigPolynomial::random(kL, 20, 1.0, seed).sample(s);
    CHECK(lp_norm(beurling(phi), 2) == doctest::Approx(lp_norm(phi, 2)).epsilon(1e-10));
  }
}

TEST_CASE("beurling intertwines the derivatives mode by mode") {
  const GridSpec s = GridSpec::make(64);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GridField f = TrigPolynomial::random(kL, 31, 1.0, seed).sample(s);
    const SpectralCoeffs a = to_spectral(beurling(d_zbar(f))), b = to_spectral(d_z(f));
    for (std::size_t m = 0; m < a.coeffs.size(); ++m) REQUIRE(std::abs(a.coeffs[m] - b.coeffs[m]) < 1e-12);
  }
}

TEST_CASE("beurling twice applies the squared multiplier") {
  const GridSpec s = GridSpec::make(32);
  const GridField phi = TrigPolynomial::random(kL, 10, 1.0, 8).sample(s);
  const SpectralCoeffs once = to_spectral(phi), twice = to_spectral(beurling(beurling(phi)));
  for (std::size_t m = 1; m < once.coeffs.size(); ++m) {
    const cplx sym = beurling_symbol(once.wavevector(m));
    REQUIRE(std::abs(twice.coeffs[m] - sym * sym * once.coeffs[m]) < 1e-13);
  }
}

TEST_CASE("operators commute on periodic fields") {
  const GridSpec s = GridSpec::make(32);
  const GridField f = TrigPolynomial::random(kL, 10, 1.0, 11).sample(s);
  CHECK(max_diff(d_z(d_zbar(f)), d_zbar(d_z(f))) < 1e-11);
  CHECK(max_diff(beurling(remove_mean(d_z(f))), d_z(beurling(remove_mean(f)))) < 1e-11);
  CHECK(max_diff(beurling(remove_mean(d_zbar(f))), d_zbar(beurling(remove_mean(f)))) < 1e-11);
}

TEST_CASE("antiderivative_zbar examples") {
  const GridSpec s = GridSpec::make(32);
  SUBCASE("zero with c = 1 gives z") {
    const GridField F = antiderivative_zbar(GridField::zeros(s), 1.0);
    CHECK(F.c() == cplx(1, 0));
    CHECK(F.d() == cplx(0, 0));
    CHECK(max_diff(F, GridField::zeros(s)) == 0.0);
  }
  SUBCASE("constant is absorbed into d") {
    const GridField F = antiderivative_zbar(GridField::constant(s, {2, 1}), 0.0);
    CHECK(std::abs(F.d() - cplx(2, 1)) < 1e-15);
    CHECK(max_diff(F, GridField::zeros(s)) < 1e-15);
  }
  SUBCASE("inverts d_zbar") {
    const GridField phi = wave(s, 1, 0);
    const GridField F = antiderivative_zbar(phi, 0.0);
    CHECK(max_diff(d_zbar(F), phi) < 1e-10);
    CHECK(std::abs(F.periodic_mean()) < 1e-15);
  }
  SUBCASE("random phi with mean") {
    const GridField phi = TrigPolynomial::random(kL, 12, 1.0, 4).sample(s) + GridField::constant(s, 0.25);
    const GridField F = antiderivative_zbar(phi, {0.5, 0.5});
    CHECK(max_diff(d_zbar(F), phi) < 1e-12);
    CHECK(std::abs(d_z(F).periodic_mean() - cplx(0.5, 0.5)) < 1e-14);
  }
}

TEST_CASE("remove_mean reports the mean") {
  const GridSpec s = GridSpec::make(16);
  cplx m;
  const GridField f = remove_mean(GridField::constant(s, {1, 2}), &m);
  CHECK(m == cplx(1, 2));
  CHECK(std::abs(f.periodic_mean()) < 1e-15);
}
