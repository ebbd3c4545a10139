#include "beltrami/calderon.hpp"

#include <numbers>

#include "beltrami/error.hpp"
#include "beltrami/fft.hpp"

namespace beltrami {

cplx SpectralCoeffs::wavevector(std::size_t m) const {
  const int n = spec.n;
  const int r = static_cast<int>(m / static_cast<std::size_t>(n));
  const int s = static_cast<int>(m % static_cast<std::size_t>(n));
  const double w = 2.0 * std::numbers::pi / spec.period;
  return {w * fft::signed_index(s, n), w * fft::signed_index(r, n)};
}

bool SpectralCoeffs::is_nyquist(std::size_t m) const {
  const auto n = static_cast<std::size_t>(spec.n);
  return m / n == n / 2 || m % n == n / 2;
}

SpectralCoeffs to_spectral(const GridField& f) { return {f.spec(), fft::forward(f.values(), f.spec().n)}; }

GridField from_spectral(const SpectralCoeffs& s, cplx c, cplx d) {
  return {s.spec, c, d, fft::inverse(s.coeffs, s.spec.n)};
}

namespace {

// Applies symbol(K) to every nonzero mode; the zero mode is replaced by `mean`.
template <class Symbol>
GridField apply_multiplier(const GridField& f, Symbol symbol, cplx mean) {
  SpectralCoeffs s = to_spectral(f);
  s.coeffs[0] = mean;
  for (std::size_t m = 1; m < s.coeffs.size(); ++m) s.coeffs[m] *= symbol(s.wavevector(m));
  return from_spectral(s);
}

}  // namespace

GridField d_zbar(const GridField& f) { return apply_multiplier(f, dzbar_symbol, f.d()); }

GridField d_z(const GridField& f) { return apply_multiplier(f, dz_symbol, f.c()); }

DerivedPair derivatives(const GridField& f) {
  const SpectralCoeffs s = to_spectral(f);
  SpectralCoeffs sz = s, szb = s;
  sz.coeffs[0] = f.c();
  szb.coeffs[0] = f.d();
  for (std::size_t m = 1; m < s.coeffs.size(); ++m) {
    const cplx K = s.wavevector(m);
    sz.coeffs[m] *= dz_symbol(K);
    szb.coeffs[m] *= dzbar_symbol(K);
  }
  return {from_spectral(sz), from_spectral(szb)};
}

GridField beurling(const GridField& phi) {
  if (phi.has_affine_part())
    throw Error(ErrorCode::InvalidArgument, "beurling: input has a nonzero affine part; strip it first");
  return apply_multiplier(phi, beurling_symbol, cplx{});
}

GridField antiderivative_zbar(const GridField& phi, cplx c) {
  if (phi.has_affine_part())
    throw Error(ErrorCode::InvalidArgument, "antiderivative_zbar: input has a nonzero affine part");
  SpectralCoeffs s = to_spectral(phi);
  const cplx mean = s.coeffs[0];
  s.coeffs[0] = {};
  for (std::size_t m = 1; m < s.coeffs.size(); ++m) s.coeffs[m] /= dzbar_symbol(s.wavevector(m));
  return from_spectral(s, c, mean);
}

GridField remove_mean(const GridField& f, cplx* mean) {
  const cplx mu = f.periodic_mean();
  if (mean) *mean = mu;
  std::vector<cplx> v(f.values().begin(), f.values().end());
  for (auto& x : v) x -= mu;
  return f.with_values(std::move(v));
}

}  // namespace beltrami
