#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace beltrami {

using cplx = std::complex<double>;

// Square periodic grid: n samples per axis over the period L.
struct GridSpec {
  int n = 16;
  double period = 2.0 * std::numbers::pi;

  // Throws InvalidArgument unless n is a power of two >= 16 and period > 0.
  static GridSpec make(int n, double period = 2.0 * std::numbers::pi);

  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  double spacing() const { return period / n; }
  // Location of sample (row i, column j): x = j*h, y = i*h.
  cplx point(int i, int j) const { return {j * spacing(), i * spacing()}; }
  cplx point(std::size_t idx) const {
    return point(static_cast<int>(idx / static_cast<std::size_t>(n)),
                 static_cast<int>(idx % static_cast<std::size_t>(n)));
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

bool is_valid_grid_size(int n);

// f(z) = c*z + d*conj(z) + P(z) with P periodic and sampled on the grid.
class GridField {
 public:
  GridField(GridSpec spec, cplx c, cplx d, std::vector<cplx> values);

  static GridField zeros(GridSpec spec);
  static GridField constant(GridSpec spec, cplx value);

  const GridSpec& spec() const { return spec_; }
  cplx c() const { return c_; }
  cplx d() const { return d_; }
  std::span<const cplx> values() const { return values_; }
  cplx periodic(std::size_t idx) const { return values_[idx]; }
  cplx periodic(int i, int j) const { return values_[static_cast<std::size_t>(i) * spec_.n + j]; }
  cplx periodic_mean() const;
  bool has_affine_part() const { return c_ != cplx{} || d_ != cplx{}; }

  // Full value c*z + d*conj(z) + P(z) at a grid sample.
  cplx total(std::size_t idx) const {
    const cplx z = spec_.point(idx);
    return c_ * z + d_ * std::conj(z) + values_[idx];
  }
  std::vector<cplx> total_values() const;

  GridField with_affine(cplx c, cplx d) const { return {spec_, c, d, values_}; }
  GridField with_values(std::vector<cplx> values) const { return {spec_, c_, d_, std::move(values)}; }

 private:
  GridSpec spec_;
  cplx c_;
  cplx d_;
  std::vector<cplx> values_;
};

// (df/dz, df/dzbar) of one field.
struct DerivedPair {
  GridField dz;
  GridField dzbar;
};

GridField make_field(const GridSpec& spec, cplx c, cplx d, std::span<const cplx> periodic_samples);

// Periodic field sampled from a function of the grid point.
GridField sample_field(const GridSpec& spec, const std::function<cplx(cplx)>& fn, cplx c = {}, cplx d = {});

// Riemann-sum (mean |f|^p)^(1/p) over one period. p may be +inf.
double lp_norm(const GridField& f, double p, bool periodic_only = false);

// Pointwise operations on the periodic parts; affine parts combine linearly.
GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(cplx s, const GridField& f);
GridField conj(const GridField& f);
// Applies fn to every periodic sample; the affine part must be zero.
GridField pointwise(const GridField& f, const std::function<cplx(cplx)>& fn);

void require_same_spec(const GridField& a, const GridField& b);

// BFLD1 text format.
GridField read_field(const std::string& path);
void write_field(const GridField& f, const std::string& path);
GridField parse_field(const std::string& text);
std::string format_field(const GridField& f);

// Finite sum of plane waves coef * exp(i (2 pi / L)(k1 x + k2 y)); evaluates
// anywhere in the plane, not only on grid points.
class TrigPolynomial {
 public:
  struct Mode {
    int k1;
    int k2;
    cplx coef;
  };

  TrigPolynomial(double period, std::vector<Mode> modes) : period_(period), modes_(std::move(modes)) {}

  // Random modes with |k1|,|k2| <= bandwidth, (0,0) excluded, amplitudes
  // decaying like 1/(1+|k|^2) and scaled by `amplitude`.
  static TrigPolynomial random(double period, int bandwidth, double amplitude, std::uint64_t seed);

  double period() const { return period_; }
  const std::vector<Mode>& modes() const { return modes_; }

  cplx operator()(cplx z) const;
  cplx dz(cplx z) const;
  cplx dzbar(cplx z) const;
  GridField sample(const GridSpec& spec) const;

 private:
  double period_;
  std::vector<Mode> modes_;
};

}  // namespace beltrami
