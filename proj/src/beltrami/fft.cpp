#include "beltrami/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace beltrami::fft {
namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. Plans are created with FFTW_ESTIMATE so the chosen algorithm,
// and therefore every output bit, is reproducible from run to run.
std::mutex plan_mutex;

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* a = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  auto* b = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  Plans p;
  p.forward = fftw_plan_dft_2d(n, n, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_2d(n, n, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
  if (!p.forward || !p.backward) throw std::runtime_error("fftw planning failed");
  return cache.emplace(n, p).first->second;
}

// fftw_malloc guarantees the alignment the plans were made with.
class AlignedBuffer {
 public:
  explicit AlignedBuffer(std::size_t len) : data_(fftw_alloc_complex(len)), len_(len) {
    if (!data_) throw std::bad_alloc();
  }
  ~AlignedBuffer() { fftw_free(data_); }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;

  fftw_complex* get() { return data_; }
  void load(std::span<const std::complex<double>> src) {
    std::memcpy(data_, src.data(), len_ * sizeof(fftw_complex));
  }
  std::vector<std::complex<double>> store(double scale) const {
    std::vector<std::complex<double>> out(len_);
    for (std::size_t i = 0; i < len_; ++i) out[i] = {data_[i][0] * scale, data_[i][1] * scale};
    return out;
  }

 private:
  fftw_complex* data_;
  std::size_t len_;
};

std::vector<std::complex<double>> run(std::span<const std::complex<double>> in, int n, bool fwd) {
  const auto len = static_cast<std::size_t>(n) * n;
  if (in.size() != len) throw std::invalid_argument("fft: sample count does not match n*n");
  const Plans& p = plans_for(n);
  AlignedBuffer src(len), dst(len);
  src.load(in);
  fftw_execute_dft(fwd ? p.forward : p.backward, src.get(), dst.get());
  return dst.store(fwd ? 1.0 / static_cast<double>(len) : 1.0);
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> samples, int n) {
  return run(samples, n, true);
}

std::vector<std::complex<double>> inverse(std::span<const std::complex<double>> coeffs, int n) {
  return run(coeffs, n, false);
}

}  // namespace beltrami::fft
