#pragma once

#include <complex>
#include <span>
#include <vector>

namespace beltrami::fft {

// Normalized 2D DFT on an n x n row-major grid. forward() returns
// coefficients c[k] with samples = sum_k c[k] exp(+2 pi i k.x / n), so c[0] is
// the sample mean. inverse() is the exact adjoint synthesis.
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> samples, int n);
std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> coeffs, int n);

// Signed frequency for array index m: [0, n/2) -> m, [n/2, n) -> m - n.
// The Nyquist index n/2 maps to -n/2.
inline int signed_index(int m, int n) { return m < n / 2 ? m : m - n; }

// Array index holding the mode -k for the mode stored at index m.
inline int negated_index(int m, int n) { return (n - m) % n; }

}  // namespace beltrami::fft
