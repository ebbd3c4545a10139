#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <filesystem>
#include <numbers>

#include "beltrami/calderon.hpp"
#include "beltrami/error.hpp"
#include "beltrami/field.hpp"

using namespace beltrami;
using doctest::Approx;

namespace {
constexpr double kL = 2.0 * std::numbers::pi;

std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return std::nullopt;
}
}  // namespace

TEST_CASE("GridSpec validates size and period") {
  CHECK(GridSpec::make(16).n == 16);
  CHECK(GridSpec::make(256, 1.0).period == 1.0);
  CHECK_THROWS_AS(GridSpec::make(8), Error);
  CHECK_THROWS_AS(GridSpec::make(48), Error);
  CHECK_THROWS_AS(GridSpec::make(16, 0.0), Error);
  CHECK_THROWS_AS(GridSpec::make(16, -1.0), Error);
  CHECK(is_valid_grid_size(1024));
  CHECK_FALSE(is_valid_grid_size(0));
}

TEST_CASE("grid points sit at cell corners starting at zero") {
  const GridSpec s = GridSpec::make(16, 4.0);
  CHECK(s.point(0) == cplx(0, 0));
  CHECK(s.point(0, 1) == cplx(0.25, 0));
  CHECK(s.point(2, 0) == cplx(0, 0.5));
  CHECK(s.point(std::size_t{16 * 3 + 5}) == s.point(3, 5));
}

TEST_CASE("make_field examples") {
  const GridSpec s = GridSpec::make(16);
  SUBCASE("identity map") {
    const std::vector<cplx> zeros(s.size());
    const GridField f = make_field(s, 1.0, 0.0, zeros);
    for (std::size_t k = 0; k < s.size(); k += 37) CHECK(std::abs(f.total(k) - s.point(k)) == 0.0);
  }
  SUBCASE("constant field keeps its mean") {
    const std::vector<cplx> fives(s.size(), 5.0);
    const GridField f = make_field(s, 0.0, 0.0, fives);
    CHECK(f.periodic_mean() == cplx(5.0, 0.0));
    CHECK(f.total(17) == cplx(5.0, 0.0));
  }
  SUBCASE("composite field evaluates to 0.1 at the origin") {
    const GridField f = sample_field(s, [](cplx z) { return 0.1 * std::exp(cplx(0, 1) * z.real()); }, 1.0, 0.3);
    CHECK(f.total(0) == cplx(0.1, 0.0));
  }
  SUBCASE("length mismatch") {
    const std::vector<cplx> short_v(s.size() - 1);
    CHECK(code_of([&] { make_field(s, 0.0, 0.0, short_v); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("accessors reproduce inputs exactly") {
  const GridSpec s = GridSpec::make(32, 3.0);
  std::vector<cplx> v(s.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = {std::sin(0.1 * k), std::cos(0.37 * k)};
  const GridField f = make_field(s, {0.25, -1.5}, {1e-3, 7.0}, v);
  CHECK(f.spec() == s);
  CHECK(f.c() == cplx(0.25, -1.5));
  CHECK(f.d() == cplx(1e-3, 7.0));
  for (std::size_t k = 0; k < v.size(); ++k) REQUIRE(f.periodic(k) == v[k]);
}

TEST_CASE("lp_norm examples") {
  const GridSpec s = GridSpec::make(64);
  CHECK(lp_norm(GridField::constant(s, 2.0), 3.0) == Approx(2.0).epsilon(1e-14));
  const GridField e = sample_field(s, [](cplx z) { return std::exp(cplx(0, 1) * z.real()); });
  CHECK(lp_norm(e, 2.0) == Approx(1.0).epsilon(1e-14));
  const GridField sn = sample_field(s, [](cplx z) { return cplx(std::sin(z.real()), 0.0); });
  CHECK(lp_norm(sn, 2.0) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lp_norm(sn, INFINITY) == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lp_norm(sn, 0.5), Error);
}

TEST_CASE("lp_norm periodic_only drops the affine part") {
  const GridSpec s = GridSpec::make(16);
  const GridField f = GridField::constant(s, 1.0).with_affine(2.0, 0.0);
  CHECK(lp_norm(f, 2.0, true) == Approx(1.0));
  CHECK(lp_norm(f, 2.0) > 2.0);
}

TEST_CASE("Parseval: sample L2 norm equals coefficient norm") {
  const GridSpec s = GridSpec::make(64);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const GridField f = TrigPolynomial::random(kL, 10, 1.0, seed).sample(s);
    const SpectralCoeffs c = to_spectral(f);
    double e = 0.0;
    for (const cplx& x : c.coeffs) e += std::norm(x);
    CHECK(lp_norm(f, 2.0) == Approx(std::sqrt(e)).epsilon(1e-10));
  }
}

TEST_CASE("arithmetic combines affine parts linearly") {
  const GridSpec s = GridSpec::make(16);
  const GridField a = GridField::constant(s, 1.0).with_affine({1, 1}, {0, 2});
  const GridField b = GridField::constant(s, {0, 3}).with_affine({2, 0}, {1, 0});
  const GridField sum = a + b;
  CHECK(sum.c() == cplx(3, 1));
  CHECK(sum.d() == cplx(1, 2));
  CHECK(sum.periodic(5) == cplx(1, 3));
  const GridField diff = a - b;
  CHECK(diff.c() == cplx(-1, 1));
  const GridField sc = cplx(0, 1) * a;
  CHECK(sc.c() == cplx(-1, 1));
  const GridField cj = conj(a);
  CHECK(cj.c() == cplx(0, -2));
  CHECK(cj.d() == cplx(1, -1));
  for (std::size_t k = 0; k < s.size(); k += 11) CHECK(std::abs(cj.total(k) - std::conj(a.total(k))) < 1e-14);
  CHECK_THROWS_AS(a + GridField::zeros(GridSpec::make(32)), Error);
}

TEST_CASE("pointwise maps the periodic samples") {
  const GridSpec s = GridSpec::make(16);
  const GridField f = GridField::constant(s, {3, 4});
  CHECK(pointwise(f, [](cplx z) { return std::abs(z); }).periodic(0) == cplx(5, 0));
}

TEST_CASE("BFLD1 round trip") {
  const GridSpec s = GridSpec::make(16, 1.7);
  const GridField f = TrigPolynomial::random(1.7, 3, 1.0, 42).sample(s).with_affine({0.1, 1.0 / 3.0}, {-2e-300, 5});
  const GridField g = parse_field(format_field(f));
  CHECK(g.spec() == f.spec());
  CHECK(g.c() == f.c());
  CHECK(g.d() == f.d());
  for (std::size_t k = 0; k < s.size(); ++k) REQUIRE(g.periodic(k) == f.periodic(k));
  CHECK(format_field(g) == format_field(f));

  const auto path = std::filesystem::temp_directory_path() / "bt_field_roundtrip.bfld";
  write_field(f, path.string());
  CHECK(format_field(read_field(path.string())) == format_field(f));
  std::filesystem::remove(path);
}

TEST_CASE("BFLD1 identity header encodes f(z) = z") {
  std::string text = "BFLD1 16 16 6.283185307179586 1 0 0 0\n";
  for (int i = 0; i < 256; ++i) text += "0 0\n";
  const GridField f = parse_field(text);
  CHECK(f.c() == cplx(1, 0));
  CHECK(f.spec().period == 6.283185307179586);
  CHECK(f.total(20) == f.spec().point(20));
}

TEST_CASE("BFLD1 errors") {
  std::string head = "BFLD1 16 16 6.283185307179586 1 0 0 0\n";
  std::string rows;
  for (int i = 0; i < 255; ++i) rows += "0 0\n";
  SUBCASE("255 rows") {
    try {
      parse_field(head + rows);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SampleCountMismatch);
      CHECK(std::string(e.what()).find("sample-count mismatch") != std::string::npos);
    }
  }
  SUBCASE("257 rows") {
    CHECK(code_of([&] { parse_field(head + rows + "0 0\n0 0\n"); }) == ErrorCode::SampleCountMismatch);
  }
  SUBCASE("bad magic") {
    CHECK(code_of([&] { parse_field("BFLD2 16 16 1 0 0 0 0\n" + rows + "0 0\n"); }) == ErrorCode::MalformedFile);
  }
  SUBCASE("non power of two") {
    CHECK(code_of([&] { parse_field("BFLD1 12 12 1 0 0 0 0\n"); }) == ErrorCode::MalformedFile);
  }
  SUBCASE("non-finite sample") {
    CHECK(code_of([&] { parse_field(head + rows.substr(4) + "nan 0\n0 0\n"); }) == ErrorCode::NonFiniteValue);
  }
  SUBCASE("missing file") { CHECK(code_of([] { read_field("/nonexistent/x.bfld"); }) == ErrorCode::Io); }
}

TEST_CASE("TrigPolynomial grid samples match pointwise evaluation") {
  const GridSpec s = GridSpec::make(32);
  const TrigPolynomial P = TrigPolynomial::random(kL, 20, 1.0, 7);  // aliases on n = 32
  const GridField f = P.sample(s);
  for (std::size_t k = 0; k < s.size(); k += 13) CHECK(std::abs(f.periodic(k) - P(s.point(k))) < 1e-12);
}

TEST_CASE("TrigPolynomial derivatives match finite differences") {
  const TrigPolynomial P = TrigPolynomial::random(kL, 3, 1.0, 9);
  const cplx z(0.7, 1.9);
  const double h = 1e-5;
  const cplx fx = (P(z + h) - P(z - h)) / (2 * h);
  const cplx fy = (P(z + cplx(0, h)) - P(z - cplx(0, h))) / (2 * h);
  CHECK(std::abs(P.dz(z) - 0.5 * (fx - cplx(0, 1) * fy)) < 1e-8);
  CHECK(std::abs(P.dzbar(z) - 0.5 * (fx + cplx(0, 1) * fy)) < 1e-8);
}
