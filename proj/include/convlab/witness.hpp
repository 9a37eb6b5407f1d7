#pragma once

// The Poisson-kernel family f_{a,t}: the Fourier transform of a exp(-2 pi t |x|),
//   f_{a,t}(x) = a C_d t / (t^2 + |x|^2)^{(d+1)/2},  C_d = Gamma((d+1)/2) / pi^{(d+1)/2},
// whose members with 0 < a <= 1/2 satisfy f >= f * f.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include "convlab/errors.hpp"
#include "convlab/field.hpp"

namespace convlab {

struct PoissonParams {
  double a = 0.5;
  double t = 1.0;
  Grid grid;

  /// 0 < a <= 1/2, where f >= f * f is guaranteed.
  bool in_family() const noexcept { return a > 0.0 && a <= 0.5 && t > 0.0; }
};

/// How the heavy-tailed kernel is placed on the torus.
enum class PoissonSampling {
  /// Sum over all periodic images, i.e. the torus function whose Fourier
  /// coefficients are exactly a exp(-2 pi t |nu|). Keeps the mass and the
  /// inequality intact on the grid.
  periodized,
  /// Closed form restricted to the box; loses the tail mass beyond L/2.
  truncated,
};

inline double poisson_constant(int dim) {
  const double e = 0.5 * (dim + 1);
  return std::tgamma(e) / std::pow(std::numbers::pi, e);
}

inline Field poisson_field(const PoissonParams& p, PoissonSampling sampling = PoissonSampling::periodized) {
  const Grid& g = p.grid;
  if (!(p.a >= 0.0) || !(p.t > 0.0)) throw Error(ErrorCode::invalid_argument, "need a >= 0 and t > 0");
  if (p.t * g.extent() < 4.0) throw Error(ErrorCode::decay_guard, "t * L must be at least 4");

  if (sampling == PoissonSampling::truncated) {
    const double cd = poisson_constant(g.dim());
    const double power = 0.5 * (g.dim() + 1);
    return Field::sample(g, [&](std::span<const double> x) {
      double r2 = 0.0;
      for (double xi : x) r2 += xi * xi;
      return p.a * cd * p.t / std::pow(p.t * p.t + r2, power);
    });
  }

  if (g.dim() == 1) {
    // Poisson kernel of the circle: sum_m f(x + mL) = (a/L) sinh(b) / (cosh(b) - cos(2 pi x / L)),
    // b = 2 pi t / L; the denominator is written without cancellation.
    const double length = g.extent();
    const double b = 2.0 * std::numbers::pi * p.t / length;
    return Field::sample(g, [&](std::span<const double> x) {
      const double s1 = std::sinh(0.5 * b);
      const double s2 = std::sin(std::numbers::pi * x[0] / length);
      return (p.a / length) * std::sinh(b) / (2.0 * (s1 * s1 + s2 * s2));
    });
  }

  // d >= 2: synthesize from the exact Fourier coefficients. Frequencies beyond
  // the grid contribute at most exp(-2 pi t M / L) relative.
  const double two_pi_t = 2.0 * std::numbers::pi * p.t;
  Spectrum s(g);
  auto modes = s.modes();
  s.for_each_mode([&](std::size_t i, double nu2, double) {
    modes[i] = Complex(p.a * std::exp(-two_pi_t * std::sqrt(nu2)), 0.0);
  });
  return inverse_transform(s);
}

struct TwoFoldCheck {
  double min_slack = 0.0;
  double mass = 0.0;
};

/// min(f - f * f) and the mass of f.
inline TwoFoldCheck check_two_fold(const Field& f) {
  return {min_value(f - convolve(f, f)), integral(f)};
}

}  // namespace convlab
