#include "stokes/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace stokes {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_c2c_plan(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  // Plan on a scratch buffer; FFTW_ESTIMATE keeps planning deterministic.
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache[key] = plan;
  return plan;
}

fftw_plan get_dst2_plan(int rows, int cols) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(rows, cols);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  double* buf = fftw_alloc_real(static_cast<size_t>(rows) * cols);
  fftw_plan plan = fftw_plan_r2r_2d(rows, cols, buf, buf, FFTW_RODFT00, FFTW_RODFT00,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache[key] = plan;
  return plan;
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) {
  fftw_plan plan = get_c2c_plan(static_cast<int>(data.size()), FFTW_FORWARD);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
}

void fft_inverse(std::vector<std::complex<double>>& data) {
  fftw_plan plan = get_c2c_plan(static_cast<int>(data.size()), FFTW_BACKWARD);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
  const double inv = 1.0 / data.size();
  for (auto& v : data) v *= inv;
}

void dst2_inplace(std::vector<double>& data, int rows, int cols) {
  if (data.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("dst2 size mismatch");
  fftw_plan plan = get_dst2_plan(rows, cols);
  fftw_execute_r2r(plan, data.data(), data.data());
}

}  // namespace stokes
