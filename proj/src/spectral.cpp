#include "ustokes/spectral.hpp"

#include <fftw3.h>

#include <mutex>

#include "ustokes/types.hpp"

namespace ustokes {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void run_plan(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out,
              int n, int sign) {
  std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_plan p = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), sign,
                                 FFTW_ESTIMATE);
  fftw_execute(p);
  fftw_destroy_plan(p);
}

void check_slice(size_t sz, int n) {
  if (n < 4 || n % 2 != 0) throw ConfigError("slice grid must be even with n >= 4");
  if (sz != static_cast<size_t>(n) * n) throw ConfigError("slice size != n*n");
}

}  // namespace

std::vector<std::complex<double>> forward_spectrum(const std::vector<double>& slice,
                                                   int n) {
  check_slice(slice.size(), n);
  std::vector<std::complex<double>> in(slice.begin(), slice.end()), out(slice.size());
  run_plan(in, out, n, FFTW_FORWARD);
  return out;
}

std::vector<double> inverse_slice(const std::vector<std::complex<double>>& spec, int n) {
  check_slice(spec.size(), n);
  std::vector<std::complex<double>> in(spec), out(spec.size());
  run_plan(in, out, n, FFTW_BACKWARD);
  std::vector<double> res(spec.size());
  const double s = 1.0 / (static_cast<double>(n) * n);
  for (size_t i = 0; i < res.size(); ++i) res[i] = out[i].real() * s;
  return res;
}

double spectral_freq(int a, int n, double L) {
  int k = a <= n / 2 ? a : a - n;
  return M_PI / L * k;
}

}  // namespace ustokes
