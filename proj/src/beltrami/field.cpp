#include "beltrami/field.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "beltrami/error.hpp"
#include "beltrami/fft.hpp"
#include "beltrami/fft.hpp"
#include "beltrami/rng.hpp"

namespace beltrami {

bool is_valid_grid_size(int n) { return n >= 16 && (n & (n - 1)) == 0; }

GridSpec GridSpec::make(int n, double period) {
  if (!is_valid_grid_size(n))
    throw Error(ErrorCode::InvalidArgument, "grid size must be a power of two >= 16, got " + std::to_string(n));
  if (!(period > 0.0) || !std::isfinite(period))
    throw Error(ErrorCode::InvalidArgument, "grid period must be positive and finite");
  return GridSpec{n, period};
}

GridField::GridField(GridSpec spec, cplx c, cplx d, std::vector<cplx> values)
    : spec_(GridSpec::make(spec.n, spec.period)), c_(c), d_(d), values_(std::move(values)) {
  if (values_.size() != spec_.size())
    throw Error(ErrorCode::InvalidArgument, "length mismatch: expected " + std::to_string(spec_.size()) +
                                                " samples, got " + std::to_string(values_.size()));
}

GridField GridField::zeros(GridSpec spec) { return {spec, {}, {}, std::vector<cplx>(spec.size())}; }

GridField GridField::constant(GridSpec spec, cplx value) {
  return {spec, {}, {}, std::vector<cplx>(spec.size(), value)};
}

cplx GridField::periodic_mean() const {
  cplx sum{};
  for (const cplx& v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

std::vector<cplx> GridField::total_values() const {
  std::vector<cplx> out(values_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = total(k);
  return out;
}

GridField make_field(const GridSpec& spec, cplx c, cplx d, std::span<const cplx> periodic_samples) {
  return {spec, c, d, std::vector<cplx>(periodic_samples.begin(), periodic_samples.end())};
}

GridField sample_field(const GridSpec& spec, const std::function<cplx(cplx)>& fn, cplx c, cplx d) {
  std::vector<cplx> v(spec.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(spec.point(k));
  return {spec, c, d, std::move(v)};
}

double lp_norm(const GridField& f, double p, bool periodic_only) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "lp_norm requires p >= 1");
  const bool affine = !periodic_only && f.has_affine_part();
  const std::size_t len = f.spec().size();
  auto sample = [&](std::size_t k) { return std::abs(affine ? f.total(k) : f.periodic(k)); };
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < len; ++k) m = std::max(m, sample(k));
    return m;
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (std::size_t k = 0; k < len; ++k) {
      const double a = sample(k);
      sum += a * a;
    }
    return std::sqrt(sum / static_cast<double>(len));
  }
  for (std::size_t k = 0; k < len; ++k) sum += std::pow(sample(k), p);
  return std::pow(sum / static_cast<double>(len), 1.0 / p);
}

void require_same_spec(const GridField& a, const GridField& b) {
  if (!(a.spec() == b.spec())) throw Error(ErrorCode::SpecMismatch, "spec mismatch between fields");
}

namespace {

template <class Op>
GridField combine(const GridField& a, const GridField& b, Op op) {
  require_same_spec(a, b);
  std::vector<cplx> v(a.spec().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(a.periodic(k), b.periodic(k));
  return {a.spec(), op(a.c(), b.c()), op(a.d(), b.d()), std::move(v)};
}

}  // namespace

GridField operator+(const GridField& a, const GridField& b) {
  return combine(a, b, [](cplx x, cplx y) { return x + y; });
}

GridField operator-(const GridField& a, const GridField& b) {
  return combine(a, b, [](cplx x, cplx y) { return x - y; });
}

GridField operator*(cplx s, const GridField& f) {
  std::vector<cplx> v(f.values().begin(), f.values().end());
  for (auto& x : v) x *= s;
  return {f.spec(), s * f.c(), s * f.d(), std::move(v)};
}

// conj(c z + d zbar) = conj(d) z + conj(c) zbar
GridField conj(const GridField& f) {
  std::vector<cplx> v(f.values().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::conj(f.periodic(k));
  return {f.spec(), std::conj(f.d()), std::conj(f.c()), std::move(v)};
}

GridField pointwise(const GridField& f, const std::function<cplx(cplx)>& fn) {
  if (f.has_affine_part()) throw Error(ErrorCode::InvalidArgument, "pointwise: field has an affine part");
  std::vector<cplx> v(f.values().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(f.periodic(k));
  return {f.spec(), {}, {}, std::move(v)};
}

// ---------------------------------------------------------------------------
// BFLD1

std::string format_field(const GridField& f) {
  std::string out;
  out.reserve(f.spec().size() * 48 + 128);
  char buf[160];
  std::snprintf(buf, sizeof buf, "BFLD1 %d %d %.17g %.17g %.17g %.17g %.17g\n", f.spec().n, f.spec().n,
                f.spec().period, f.c().real(), f.c().imag(), f.d().real(), f.d().imag());
  out += buf;
  for (const cplx& v : f.values()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
    out += buf;
  }
  return out;
}

namespace {

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size() && errno != ERANGE;
}

bool parse_int(const std::string& tok, int& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || v <= 0 || v > (1 << 20)) return false;
  out = static_cast<int>(v);
  return true;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::MalformedFile, "malformed header: " + why);
}

}  // namespace

GridField parse_field(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) malformed("empty file");
  const auto head = split_ws(line);
  if (head.size() != 8 || head[0] != "BFLD1") malformed("expected 'BFLD1 <n> <n> <L> <c_re> <c_im> <d_re> <d_im>'");
  int n = 0, n2 = 0;
  if (!parse_int(head[1], n) || !parse_int(head[2], n2)) malformed("grid size is not a positive integer");
  if (n != n2) malformed("only square grids are supported");
  if (!is_valid_grid_size(n)) malformed("grid size must be a power of two >= 16");
  double hv[5];
  for (int k = 0; k < 5; ++k)
    if (!parse_double(head[3 + k], hv[k])) malformed("cannot parse '" + head[3 + k] + "'");
  for (double v : hv)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite values in header");
  if (!(hv[0] > 0.0)) malformed("period must be positive");

  const GridSpec spec = GridSpec::make(n, hv[0]);
  std::vector<cplx> values;
  values.reserve(spec.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (values.size() == spec.size())
      throw Error(ErrorCode::SampleCountMismatch, "sample-count mismatch: more than " +
                                                      std::to_string(spec.size()) + " samples");
    double re = 0.0, im = 0.0;
    if (toks.size() != 2 || !parse_double(toks[0], re) || !parse_double(toks[1], im))
      throw Error(ErrorCode::MalformedFile, "malformed sample on line " + std::to_string(row));
    if (!std::isfinite(re) || !std::isfinite(im))
      throw Error(ErrorCode::NonFiniteValue, "non-finite values on line " + std::to_string(row));
    values.emplace_back(re, im);
  }
  if (values.size() != spec.size())
    throw Error(ErrorCode::SampleCountMismatch, "sample-count mismatch: expected " + std::to_string(spec.size()) +
                                                    ", found " + std::to_string(values.size()));
  return {spec, {hv[1], hv[2]}, {hv[3], hv[4]}, std::move(values)};
}

GridField read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_field(ss.str());
}

void write_field(const GridField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << format_field(f);
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// TrigPolynomial

TrigPolynomial TrigPolynomial::random(double period, int bandwidth, double amplitude, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Mode> modes;
  for (int k2 = -bandwidth; k2 <= bandwidth; ++k2) {
    for (int k1 = -bandwidth; k1 <= bandwidth; ++k1) {
      if (k1 == 0 && k2 == 0) continue;
      const double decay = 1.0 / (1.0 + k1 * k1 + k2 * k2);
      modes.push_back({k1, k2, amplitude * decay * rng.complex_normal()});
    }
  }
  return {period, std::move(modes)};
}

cplx TrigPolynomial::operator()(cplx z) const {
  const double w = 2.0 * std::numbers::pi / period_;
  cplx sum{};
  for (const Mode& m : modes_) sum += m.coef * std::polar(1.0, w * (m.k1 * z.real() + m.k2 * z.imag()));
  return sum;
}

// d/dz of exp(i<k,x>) is (i/2) conj(K) exp(.), d/dzbar is (i/2) K exp(.),
// with K = (2 pi / L)(k1 + i k2).
cplx TrigPolynomial::dz(cplx z) const {
  const double w = 2.0 * std::numbers::pi / period_;
  cplx sum{};
  for (const Mode& m : modes_) {
    const cplx symbol = cplx(0.0, 0.5) * std::conj(cplx(w * m.k1, w * m.k2));
    sum += symbol * m.coef * std::polar(1.0, w * (m.k1 * z.real() + m.k2 * z.imag()));
  }
  return sum;
}

cplx TrigPolynomial::dzbar(cplx z) const {
  const double w = 2.0 * std::numbers::pi / period_;
  cplx sum{};
  for (const Mode& m : modes_) {
    const cplx symbol = cplx(0.0, 0.5) * cplx(w * m.k1, w * m.k2);
    sum += symbol * m.coef * std::polar(1.0, w * (m.k1 * z.real() + m.k2 * z.imag()));
  }
  return sum;
}

// Grid samples by synthesis: on the grid every mode coincides with the FFT
// mode of the same index modulo n, aliased or not.
GridField TrigPolynomial::sample(const GridSpec& spec) const {
  if (spec.period != period_) return sample_field(spec, [this](cplx z) { return (*this)(z); });
  const int n = spec.n;
  std::vector<cplx> coeffs(spec.size());
  for (const Mode& m : modes_) {
    const int i = ((m.k2 % n) + n) % n, j = ((m.k1 % n) + n) % n;
    coeffs[static_cast<std::size_t>(i) * n + j] += m.coef;
  }
  return {spec, {}, {}, fft::inverse(coeffs, n)};
}

}  // namespace beltrami
