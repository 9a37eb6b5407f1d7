#pragma once

// Real functions on a uniform periodic grid standing in for R^d, with L1
// calculus and spectral n-fold convolution.
//
// Nodes sit at x_k = -L/2 + k h per axis (h = L/M), so the origin is node M/2.
// Spectra are stored as samples of the continuous transform
//   w(nu) ~ int f(x) exp(-2 pi i x.nu) dx,   nu = k / L,
// which turns convolution into a pointwise product with no extra bookkeeping.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "convlab/errors.hpp"
#include "convlab/qpoly.hpp"

namespace convlab {

class Grid {
 public:
  Grid(int dim, double extent, std::size_t points) : dim_(dim), extent_(extent), points_(points) {
    if (dim < 1 || dim > 3) throw Error(ErrorCode::invalid_grid, "dimension must be 1, 2 or 3");
    if (!(extent > 0.0) || !std::isfinite(extent)) throw Error(ErrorCode::invalid_grid, "extent must be positive");
    if (points < 16 || (points & (points - 1)) != 0) {
      throw Error(ErrorCode::invalid_grid, "points per axis must be a power of two >= 16");
    }
  }

  int dim() const noexcept { return dim_; }
  double extent() const noexcept { return extent_; }
  std::size_t points() const noexcept { return points_; }
  double spacing() const noexcept { return extent_ / static_cast<double>(points_); }
  double cell_volume() const noexcept { return std::pow(spacing(), dim_); }

  std::size_t size() const noexcept {
    std::size_t n = 1;
    for (int a = 0; a < dim_; ++a) n *= points_;
    return n;
  }

  double coordinate(std::size_t k) const noexcept {
    return -0.5 * extent_ + static_cast<double>(k) * spacing();
  }

  /// Row-major multi-index of a flat node index (unused axes are 0).
  std::array<std::size_t, 3> unravel(std::size_t flat) const noexcept {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = flat % points_;
      flat /= points_;
    }
    return idx;
  }

  std::size_t origin_index() const noexcept {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat = flat * points_ + points_ / 2;
    return flat;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  double extent_;
  std::size_t points_;
};

class Field {
 public:
  explicit Field(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

  Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw Error(ErrorCode::grid_mismatch, "value count does not match the grid");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "field values must be finite");
    }
  }

  /// Samples fn at every node; fn receives the node coordinates (length d).
  template <class Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    std::vector<double> values(grid.size());
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto idx = grid.unravel(i);
      for (int a = 0; a < grid.dim(); ++a) x[static_cast<std::size_t>(a)] = grid.coordinate(idx[static_cast<std::size_t>(a)]);
      values[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
    }
    return Field(grid, std::move(values));
  }

  /// Point mass at the origin node: value mass / h^d.
  static Field delta(const Grid& grid, double mass = 1.0) {
    std::vector<double> values(grid.size(), 0.0);
    values[grid.origin_index()] = mass / grid.cell_volume();
    return Field(grid, std::move(values));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Pointwise map into a new field.
  template <class Fn>
  Field map(Fn&& fn) const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(values_[i]);
    return Field(grid_, std::move(out));
  }

  Field scaled(double s) const {
    return map([s](double v) { return s * v; });
  }

  friend Field operator+(const Field& f, const Field& g) { return combine(f, g, std::plus<>{}); }
  friend Field operator-(const Field& f, const Field& g) { return combine(f, g, std::minus<>{}); }
  friend Field operator*(const Field& f, const Field& g) { return combine(f, g, std::multiplies<>{}); }

 private:
  template <class Op>
  static Field combine(const Field& f, const Field& g, Op op) {
    if (!(f.grid_ == g.grid_)) throw Error(ErrorCode::grid_mismatch, "fields live on different grids");
    std::vector<double> out(f.values_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(f.values_[i], g.values_[i]);
    return Field(f.grid_, std::move(out));
  }

  Grid grid_;
  std::vector<double> values_;
};

inline void require_same_grid(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw Error(ErrorCode::grid_mismatch, "fields live on different grids");
}

// ---------------------------------------------------------------------------
// L1 calculus. Reductions run in index order so results are bit-reproducible.

inline double integral(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().cell_volume() * s;
}

inline double l1_norm(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += std::abs(v);
  return f.grid().cell_volume() * s;
}

/// L1 norm of the negative part f_-.
inline double negative_part_l1(const Field& f) {
  double s = 0.0;
  for (double v : f.values()) s += v < 0.0 ? -v : 0.0;
  return f.grid().cell_volume() * s;
}

inline double min_value(const Field& f) {
  double m = f.values().front();
  for (double v : f.values()) m = std::min(m, v);
  return m;
}

inline double max_value(const Field& f) {
  double m = f.values().front();
  for (double v : f.values()) m = std::max(m, v);
  return m;
}

inline double linf_diff(const Field& f, const Field& g) {
  require_same_grid(f, g);
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

inline double l1_diff(const Field& f, const Field& g) {
  require_same_grid(f, g);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i] - g[i]);
  return f.grid().cell_volume() * s;
}

/// Fraction of the L1 norm carried by nodes closer than shell_fraction * L to the
/// box boundary on any axis. Values above ~1e-6 flag wrap-around contamination.
inline double aliasing_guard(const Field& f, double shell_fraction) {
  if (!(shell_fraction > 0.0 && shell_fraction < 0.5)) {
    throw Error(ErrorCode::invalid_argument, "shell fraction must lie in (0, 0.5)");
  }
  const Grid& g = f.grid();
  const double width = shell_fraction * g.extent();
  double shell = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unravel(i);
    bool in_shell = false;
    for (int a = 0; a < g.dim(); ++a) {
      const double from_low = static_cast<double>(idx[static_cast<std::size_t>(a)]) * g.spacing();
      if (from_low < width || g.extent() - from_low < width) in_shell = true;
    }
    const double v = std::abs(f[i]);
    total += v;
    if (in_shell) shell += v;
  }
  return total == 0.0 ? 0.0 : shell / total;
}

// ---------------------------------------------------------------------------
// Spectral machinery.

namespace detail {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  FftPlans get(int dim, std::size_t points) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(dim, points);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    std::array<int, 3> n{};
    std::size_t real_size = 1;
    std::size_t half_size = 1;
    for (int a = 0; a < dim; ++a) {
      n[static_cast<std::size_t>(a)] = static_cast<int>(points);
      real_size *= points;
      half_size *= (a == dim - 1) ? points / 2 + 1 : points;
    }
    auto* in = fftw_alloc_real(real_size);
    auto* out = fftw_alloc_complex(half_size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    FftPlans p;
    p.forward = fftw_plan_dft_r2c(dim, n.data(), in, out, flags);
    p.backward = fftw_plan_dft_c2r(dim, n.data(), out, in, flags);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  std::mutex mutex_;
  std::map<std::pair<int, std::size_t>, FftPlans> plans_;
};

}  // namespace detail

using Complex = std::complex<double>;

/// Half-spectrum (real-to-complex layout) of a field, scaled to approximate the
/// continuous Fourier transform at frequencies nu = k / L.
class Spectrum {
 public:
  explicit Spectrum(Grid grid) : grid_(grid), modes_(mode_count(grid)) {}

  static std::size_t mode_count(const Grid& g) {
    std::size_t n = 1;
    for (int a = 0; a < g.dim(); ++a) n *= (a == g.dim() - 1) ? g.points() / 2 + 1 : g.points();
    return n;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<Complex> modes() noexcept { return modes_; }
  std::span<const Complex> modes() const noexcept { return modes_; }

  /// Calls fn(mode_index, |nu|^2, parity) for every stored mode, where parity is
  /// (-1)^{sum k_a}. Visiting order is the storage order.
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    const std::size_t m = grid_.points();
    const std::size_t half = m / 2 + 1;
    const double inv_l = 1.0 / grid_.extent();
    auto signed_freq = [m](std::size_t k) {
      return k <= m / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(m);
    };
    std::size_t idx = 0;
    if (grid_.dim() == 1) {
      for (std::size_t k0 = 0; k0 < half; ++k0, ++idx) {
        const double n0 = signed_freq(k0) * inv_l;
        fn(idx, n0 * n0, (k0 & 1) ? -1.0 : 1.0);
      }
    } else if (grid_.dim() == 2) {
      for (std::size_t k0 = 0; k0 < m; ++k0) {
        const double n0 = signed_freq(k0) * inv_l;
        for (std::size_t k1 = 0; k1 < half; ++k1, ++idx) {
          const double n1 = signed_freq(k1) * inv_l;
          fn(idx, n0 * n0 + n1 * n1, ((k0 + k1) & 1) ? -1.0 : 1.0);
        }
      }
    } else {
      for (std::size_t k0 = 0; k0 < m; ++k0) {
        const double n0 = signed_freq(k0) * inv_l;
        for (std::size_t k1 = 0; k1 < m; ++k1) {
          const double n1 = signed_freq(k1) * inv_l;
          for (std::size_t k2 = 0; k2 < half; ++k2, ++idx) {
            const double n2 = signed_freq(k2) * inv_l;
            fn(idx, n0 * n0 + n1 * n1 + n2 * n2, ((k0 + k1 + k2) & 1) ? -1.0 : 1.0);
          }
        }
      }
    }
  }

 private:
  Grid grid_;
  std::vector<Complex> modes_;
};

/// w(nu_k) = h^d (-1)^{sum k} DFT(f)_k.
inline Spectrum transform(const Field& f) {
  const Grid& g = f.grid();
  Spectrum s(g);
  std::vector<double> input(f.values().begin(), f.values().end());
  const auto plans = detail::PlanCache::instance().get(g.dim(), g.points());
  fftw_execute_dft_r2c(plans.forward, input.data(), reinterpret_cast<fftw_complex*>(s.modes().data()));
  const double h = g.cell_volume();
  auto modes = s.modes();
  s.for_each_mode([&](std::size_t i, double, double parity) { modes[i] *= h * parity; });
  return s;
}

inline Field inverse_transform(const Spectrum& s) {
  const Grid& g = s.grid();
  std::vector<Complex> work(s.modes().begin(), s.modes().end());
  const double scale = 1.0 / (g.cell_volume() * static_cast<double>(g.size()));
  s.for_each_mode([&](std::size_t i, double, double parity) { work[i] *= scale * parity; });
  std::vector<double> out(g.size());
  const auto plans = detail::PlanCache::instance().get(g.dim(), g.points());
  fftw_execute_dft_c2r(plans.backward, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  return Field(g, std::move(out));
}

/// Applies fn(w, |nu|^2) -> w' to every mode of f's spectrum and transforms back.
template <class Fn>
Field spectral_map(const Field& f, Fn&& fn) {
  Spectrum s = transform(f);
  auto modes = s.modes();
  s.for_each_mode([&](std::size_t i, double nu2, double) { modes[i] = fn(modes[i], nu2); });
  return inverse_transform(s);
}

/// (f * g)(x) = int f(y) g(x - y) dy on the torus.
inline Field convolve(const Field& f, const Field& g) {
  require_same_grid(f, g);
  Spectrum sf = transform(f);
  const Spectrum sg = transform(g);
  auto a = sf.modes();
  auto b = sg.modes();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return inverse_transform(sf);
}

namespace detail {

inline Complex ipow(Complex z, int n) {
  Complex r(1.0, 0.0);
  while (n > 0) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

}  // namespace detail

/// n-fold self-convolution with one transform pair.
inline Field conv_power(const Field& f, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_order, "convolution power must be >= 1");
  if (n == 1) return f;
  return spectral_map(f, [n](Complex w, double) { return detail::ipow(w, n); });
}

/// sum a_n (*^n f), assembled in the spectral domain.
inline Field apply_p(const Field& f, const CoeffVector& coeffs) {
  return spectral_map(f, [&coeffs](Complex w, double) { return eval_p(coeffs, w); });
}

/// Centered Gaussian with standard deviation sigma per axis, normalized on the
/// grid to the requested mass.
inline Field gaussian_field(const Grid& grid, double sigma, double mass) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::invalid_argument, "sigma must be positive");
  Field raw = Field::sample(grid, [sigma](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return std::exp(-0.5 * r2 / (sigma * sigma));
  });
  return raw.scaled(mass / integral(raw));
}

}  // namespace convlab
