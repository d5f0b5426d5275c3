#include "rsbarrier/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "rsbarrier/simd.hpp"

namespace rsb {

struct Fft::Plans {
  fftw_plan fwd_inplace = nullptr;
  fftw_plan bwd_inplace = nullptr;
  fftw_plan fwd_outplace = nullptr;
  fftw_plan bwd_outplace = nullptr;
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the whole process; keyed by size.
std::map<std::size_t, std::shared_ptr<Fft::Plans>>& plan_cache() {
  static std::map<std::size_t, std::shared_ptr<Fft::Plans>> cache;
  return cache;
}
}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) {
    plans_ = it->second;
    return;
  }
  auto p = std::make_shared<Plans>();
  CVector a(n), b(n);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  int ni = static_cast<int>(n);
  p->fwd_inplace = fftw_plan_dft_1d(ni, pa, pa, FFTW_FORWARD, FFTW_ESTIMATE);
  p->bwd_inplace = fftw_plan_dft_1d(ni, pa, pa, FFTW_BACKWARD, FFTW_ESTIMATE);
  p->fwd_outplace = fftw_plan_dft_1d(ni, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE);
  p->bwd_outplace = fftw_plan_dft_1d(ni, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE);
  cache.emplace(n, p);
  plans_ = p;
}

void Fft::forward(const cplx* in, cplx* out) const {
  auto* i = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in));
  auto* o = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(in == out ? plans_->fwd_inplace : plans_->fwd_outplace, i, o);
}

void Fft::backward(const cplx* in, cplx* out) const {
  auto* i = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in));
  auto* o = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(in == out ? plans_->bwd_inplace : plans_->bwd_outplace, i, o);
}

void Fft::inverse(CVector& data) const {
  backward(data.data(), data.data());
  simd::kernels().scale_real(data.data(), 1.0 / static_cast<double>(n_), data.size());
}

}  // namespace rsb
