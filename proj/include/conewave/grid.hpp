#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conewave/error.hpp"

namespace conewave {

using Complex = std::complex<double>;

/// Dense row-major n1 x n2 array. Index (i, j): i runs along the first
/// coordinate axis, j along the second.
template <class T>
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t n1, std::size_t n2, T fill = T{}) : n1_(n1), n2_(n2), data_(n1 * n2, fill) {}

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n2_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n2_ + j]; }
  T& operator[](std::size_t k) { return data_[k]; }
  const T& operator[](std::size_t k) const { return data_[k]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool same_shape(const Raster& other) const { return n1_ == other.n1_ && n2_ == other.n2_; }

 private:
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::vector<T> data_;
};

/// Uniform sampling of the frequency square [-extent, extent)^2.
///
/// Sample i on an axis with n samples sits at (i - floor(n/2)) * 2*extent/n.
/// For even n this is exactly -extent + i*2*extent/n; for odd n the lattice
/// is shifted by half a step so that the origin stays a sample. Coordinates
/// are recomputed from (n, extent) on every call, so two grids built from the
/// same parameters agree bit for bit.
///
/// The paired spatial lattice has step 1/(2*extent) on both axes and is
/// centred the same way.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  FrequencyGrid(std::size_t n1, std::size_t n2, double extent) : n1_(n1), n2_(n2), extent_(extent) {
    if (n1 < 2 || n2 < 2) throw InvalidArgument("frequency grid needs at least 2 samples per axis");
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw InvalidArgument("frequency grid extent must be positive and finite");
  }

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return n1_ * n2_; }
  double extent() const { return extent_; }

  double spacing1() const { return 2.0 * extent_ / static_cast<double>(n1_); }
  double spacing2() const { return 2.0 * extent_ / static_cast<double>(n2_); }
  double cell_area() const { return spacing1() * spacing2(); }

  std::size_t center1() const { return n1_ / 2; }
  std::size_t center2() const { return n2_ / 2; }
  bool contains_origin() const { return true; }

  double xi1(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(center1())) * spacing1();
  }
  double xi2(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(center2())) * spacing2();
  }

  // Spatial lattice paired with this grid.
  double space_step() const { return 1.0 / (2.0 * extent_); }
  double x1(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(center1())) * space_step();
  }
  double x2(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(center2())) * space_step();
  }
  double period1() const { return static_cast<double>(n1_) * space_step(); }
  double period2() const { return static_cast<double>(n2_) * space_step(); }

  friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
    return a.n1_ == b.n1_ && a.n2_ == b.n2_ && a.extent_ == b.extent_;
  }

 private:
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  double extent_ = 0.0;
};

inline FrequencyGrid build_frequency_grid(std::size_t n1, std::size_t n2, double extent) {
  return FrequencyGrid(n1, n2, extent);
}

inline void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b, const char* what) {
  if (!(a == b)) throw ContractViolation(std::string("grid mismatch: ") + what);
}

/// Real samples of a function on the spatial lattice of a FrequencyGrid.
struct SpatialField {
  FrequencyGrid grid;
  Raster<double> values;

  SpatialField() = default;
  explicit SpatialField(const FrequencyGrid& g) : grid(g), values(g.n1(), g.n2()) {}
  SpatialField(const FrequencyGrid& g, Raster<double> v) : grid(g), values(std::move(v)) {
    if (values.n1() != g.n1() || values.n2() != g.n2())
      throw ContractViolation("spatial field shape does not match its grid");
  }

  double step() const { return grid.space_step(); }

  double norm() const {
    double sum = 0.0;
    for (double v : values.values()) sum += v * v;
    return std::sqrt(sum) * step();
  }

  bool finite() const {
    for (double v : values.values())
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Complex samples of a spectrum on a FrequencyGrid. `hermitian` marks the
/// spectrum of a real field (conjugate symmetric about the origin).
struct SampledSpectrum {
  FrequencyGrid grid;
  Raster<Complex> values;
  bool hermitian = false;

  SampledSpectrum() = default;
  explicit SampledSpectrum(const FrequencyGrid& g, bool herm = false)
      : grid(g), values(g.n1(), g.n2()), hermitian(herm) {}

  double norm() const {
    double sum = 0.0;
    for (const Complex& v : values.values()) sum += std::norm(v);
    return std::sqrt(sum * grid.cell_area());
  }
};

/// Real-valued function sampled on a FrequencyGrid (multipliers, projections,
/// Calderon sums, window squares).
struct SpectralMap {
  FrequencyGrid grid;
  Raster<double> values;

  SpectralMap() = default;
  explicit SpectralMap(const FrequencyGrid& g, double fill = 0.0) : grid(g), values(g.n1(), g.n2(), fill) {}

  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
  double& operator()(std::size_t i, std::size_t j) { return values(i, j); }
};

/// Index of the sample mirrored through the origin, for conjugate symmetry.
inline std::size_t mirror_index(std::size_t i, std::size_t n) {
  const std::size_t c = n / 2;
  // position p = i - c; mirrored position -p, wrapped into [0, n)
  return (2 * c + n - i) % n;
}

}  // namespace conewave
