#pragma once

#include <cstddef>
#include <memory>

#include "rsbarrier/aligned.hpp"

namespace rsb {

// Unnormalized complex DFT of fixed size backed by FFTW.
//   forward:  X_k = sum_n x_n exp(-2 pi i k n / M)
//   backward: x_n = sum_k X_k exp(+2 pi i k n / M)
// Plans are created once per size (FFTW_ESTIMATE, deterministic) and shared;
// execution is thread-safe on 64-byte aligned buffers.
class Fft {
 public:
  explicit Fft(std::size_t n);
  std::size_t size() const { return n_; }
  void forward(const cplx* in, cplx* out) const;
  void backward(const cplx* in, cplx* out) const;
  void forward(CVector& data) const { forward(data.data(), data.data()); }
  // Backward transform scaled by 1/M.
  void inverse(CVector& data) const;

  struct Plans;

 private:
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace rsb
