#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "conewave/error.hpp"
#include "conewave/grid.hpp"

namespace conewave {

namespace detail {

// FFTW planning is not thread-safe, execution on fresh arrays is. Plans are
// made once per (n1, n2, sign) with FFTW_UNALIGNED so any buffer can be used.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n1, std::size_t n2, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(n1, n2, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(n1 * n2);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), buf, buf, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw Error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

// Centered layout (index i <-> position i - n/2) to FFT layout (position mod n).
inline std::vector<Complex> to_fft_layout(const Raster<Complex>& centered) {
  const std::size_t n1 = centered.n1(), n2 = centered.n2();
  const std::size_t c1 = n1 / 2, c2 = n2 / 2;
  std::vector<Complex> out(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t p = (i + n1 - c1) % n1;
    for (std::size_t j = 0; j < n2; ++j) out[p * n2 + (j + n2 - c2) % n2] = centered(i, j);
  }
  return out;
}

inline Raster<Complex> from_fft_layout(const std::vector<Complex>& buf, std::size_t n1, std::size_t n2,
                                       double scale) {
  const std::size_t c1 = n1 / 2, c2 = n2 / 2;
  Raster<Complex> out(n1, n2);
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t p = (i + n1 - c1) % n1;
    for (std::size_t j = 0; j < n2; ++j) out(i, j) = buf[p * n2 + (j + n2 - c2) % n2] * scale;
  }
  return out;
}

inline Raster<Complex> centered_dft(const Raster<Complex>& in, int sign, double scale) {
  std::vector<Complex> buf = to_fft_layout(in);
  fftw_plan plan = PlanCache::instance().get(in.n1(), in.n2(), sign);
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plan, p, p);
  return from_fft_layout(buf, in.n1(), in.n2(), scale);
}

}  // namespace detail

/// Space -> frequency on centered rasters:
/// out(xi_k) = h^2 * sum_j in(x_j) exp(+2 pi i xi_k . x_j).
inline Raster<Complex> forward_raster(const FrequencyGrid& grid, const Raster<Complex>& in) {
  if (in.n1() != grid.n1() || in.n2() != grid.n2()) throw ContractViolation("raster does not match grid");
  const double h = grid.space_step();
  return detail::centered_dft(in, FFTW_BACKWARD, h * h);
}

/// Frequency -> space: out(x_j) = dxi1 dxi2 * sum_k in(xi_k) exp(-2 pi i xi_k . x_j).
inline Raster<Complex> inverse_raster(const FrequencyGrid& grid, const Raster<Complex>& in) {
  if (in.n1() != grid.n1() || in.n2() != grid.n2()) throw ContractViolation("raster does not match grid");
  return detail::centered_dft(in, FFTW_FORWARD, grid.cell_area());
}

inline Raster<Complex> complexify(const Raster<double>& in) {
  Raster<Complex> out(in.n1(), in.n2());
  for (std::size_t k = 0; k < in.size(); ++k) out[k] = in[k];
  return out;
}

inline SampledSpectrum forward_spectrum(const SpatialField& field) {
  if (field.values.n1() != field.grid.n1() || field.values.n2() != field.grid.n2())
    throw ContractViolation("spatial field is not paired with its grid");
  if (!field.finite()) throw InvalidArgument("spatial field has non-finite samples");
  SampledSpectrum out(field.grid, true);
  out.values = forward_raster(field.grid, complexify(field.values));
  return out;
}

/// Real part of the inverse transform. For spectra not flagged hermitian the
/// imaginary part is dropped; use inverse_raster to keep it.
inline SpatialField inverse_field(const SampledSpectrum& spectrum) {
  if (spectrum.values.n1() != spectrum.grid.n1() || spectrum.values.n2() != spectrum.grid.n2())
    throw ContractViolation("spectrum is not paired with its grid");
  Raster<Complex> z = inverse_raster(spectrum.grid, spectrum.values);
  SpatialField out(spectrum.grid);
  for (std::size_t k = 0; k < z.size(); ++k) out.values[k] = z[k].real();
  return out;
}

/// Largest |imag| of the inverse transform relative to the field norm.
inline double inverse_imaginary_ratio(const SampledSpectrum& spectrum) {
  Raster<Complex> z = inverse_raster(spectrum.grid, spectrum.values);
  double im = 0.0, re = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    im = std::max(im, std::abs(z[k].imag()));
    re += std::norm(z[k]);
  }
  re = std::sqrt(re);
  return re > 0.0 ? im / re : 0.0;
}

}  // namespace conewave
