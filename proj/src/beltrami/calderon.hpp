#pragma once

#include <vector>

#include "beltrami/field.hpp"

namespace beltrami {

// Fourier coefficients of the periodic part of a field. Index m = r*n + s
// carries the plane wave exp(i (2 pi / L)(k1 x + k2 y)) with
// k1 = signed(s), k2 = signed(r).
struct SpectralCoeffs {
  GridSpec spec;
  std::vector<cplx> coeffs;

  // Complex wavevector (2 pi / L)(k1 + i k2) of array index m.
  cplx wavevector(std::size_t m) const;
  bool is_nyquist(std::size_t m) const;
};

SpectralCoeffs to_spectral(const GridField& f);
// Periodic field with the given affine part.
GridField from_spectral(const SpectralCoeffs& s, cplx c = {}, cplx d = {});

// Symbols of the spectral operators at wavevector K.
inline cplx dz_symbol(cplx K) { return cplx(0.0, 0.5) * std::conj(K); }
inline cplx dzbar_symbol(cplx K) { return cplx(0.0, 0.5) * K; }
inline cplx beurling_symbol(cplx K) { return std::conj(K) / K; }

// df/dzbar. The affine coefficient d becomes the mean of the result; the
// result carries no affine part.
GridField d_zbar(const GridField& f);
// df/dz. The affine coefficient c becomes the mean of the result.
GridField d_z(const GridField& f);
DerivedPair derivatives(const GridField& f);

// Beurling transform: multiplier conj(K)/K on every nonzero mode, zero on the
// mean. Rejects fields with an affine part.
GridField beurling(const GridField& phi);

// F with dF/dzbar = phi: affine d = mean(phi), affine c as given, periodic
// part of mean zero. phi must not carry an affine part.
GridField antiderivative_zbar(const GridField& phi, cplx c);

// Removes the mean of the periodic part (Pi_0), returning the removed mean.
GridField remove_mean(const GridField& f, cplx* mean = nullptr);

}  // namespace beltrami
