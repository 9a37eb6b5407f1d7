#pragma once

// Complex-analytic certificates on the disk D = {|z| < t_Q}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "convlab/errors.hpp"
#include "convlab/parallel.hpp"
#include "convlab/qpoly.hpp"
#include "convlab/tolerances.hpp"

namespace convlab {

using Complex = std::complex<double>;

/// All N_2 - 1 roots of Q'(z) = 1 - P'(z), with multiplicity.
inline std::vector<Complex> qprime_roots(const CoeffVector& coeffs,
                                         const Tolerances& tol = default_tolerances) {
  const int degree = coeffs.max_active() - 1;
  // Q'(z) = 1 + sum_{k=1}^{degree} c_k z^k with c_k = -(k+1) a_{k+1}.
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  c[0] = 1.0;
  for (int k = 1; k <= degree; ++k) c[static_cast<std::size_t>(k)] = -(k + 1.0) * static_cast<double>(coeffs[k + 1]);

  std::vector<Complex> roots;
  if (degree == 1) {
    roots.emplace_back(-c[0] / c[1], 0.0);
  } else {
    // Companion matrix of the monic polynomial z^d + sum_{k<d} (c_k / c_d) z^k.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int k = 0; k < degree; ++k) {
      companion(k, degree - 1) = -c[static_cast<std::size_t>(k)] / c[static_cast<std::size_t>(degree)];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::convergence_failure, "companion eigenvalue solve failed");
    }
    for (int i = 0; i < degree; ++i) roots.push_back(solver.eigenvalues()[i]);
  }

  // Newton polish on Q' (Q'' = -P'').
  for (auto& z : roots) {
    for (int it = 0; it < 50; ++it) {
      const Complex f = eval_q_prime(coeffs, z);
      const Complex df = -eval_p_second(coeffs, z);
      if (std::abs(df) == 0.0) break;
      const Complex next = z - f / df;
      if (std::abs(eval_q_prime(coeffs, next)) >= std::abs(f)) break;
      z = next;
    }
    if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z))) z = {z.real(), 0.0};
  }

  const double target = tol.root_residual * coeffs.derivative_weight();
  for (const auto& z : roots) {
    if (!(std::abs(eval_q_prime(coeffs, z)) <= target)) {
      throw Error(ErrorCode::convergence_failure, "root of Q' missed its residual target");
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) < std::abs(y);
    return std::arg(x) < std::arg(y);
  });
  return roots;
}

struct ScanOptions {
  int radial_steps = 64;
  int angular_steps = 128;
  std::size_t pair_samples = 10000;
  std::uint64_t seed = 0;
  /// Scan radius as a multiple of t_Q.
  double radius_factor = 0.999;
  unsigned workers = 1;
};

struct DiskReport {
  double t_q = 0.0;
  double scan_radius = 0.0;
  std::vector<Complex> qprime_roots;
  double min_modulus_root = 0.0;
  /// Distance from t_Q to the nearest root of Q'.
  double positive_root_error = 0.0;
  double sup_p_prime = 0.0;
  double sup_p_over_z = 0.0;
  std::size_t pairs_checked = 0;
  std::size_t injectivity_violations = 0;
};

namespace detail {

/// Uniform double in [0, 1) built from the top 53 bits, identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Evaluates |P'| and |P/z| on a polar grid and checks the Lipschitz lower bound
/// |Q(z1) - Q(z2)| >= (1 - sup|P'|) |z1 - z2| on random pairs.
inline DiskReport disk_scan(const PolyQ& poly, const ScanOptions& opt,
                            const Tolerances& tol = default_tolerances) {
  if (opt.radial_steps < 8 || opt.angular_steps < 8) {
    throw Error(ErrorCode::invalid_argument, "scan needs at least 8 radial and angular steps");
  }
  const CoeffVector& c = poly.coeffs();
  DiskReport report;
  report.t_q = poly.t_q();
  report.scan_radius = opt.radius_factor * poly.t_q();
  report.qprime_roots = qprime_roots(c, tol);
  report.min_modulus_root = std::abs(report.qprime_roots.front());
  report.positive_root_error = std::numeric_limits<double>::infinity();
  for (const auto& z : report.qprime_roots) {
    report.positive_root_error = std::min(report.positive_root_error, std::abs(z - Complex(poly.t_q(), 0.0)));
  }

  const double radius = report.scan_radius;
  const auto rings = static_cast<std::size_t>(opt.radial_steps) + 1;
  std::vector<double> ring_p_prime(rings, 0.0);
  std::vector<double> ring_p_over_z(rings, 0.0);
  parallel_for(rings, opt.workers, [&](std::size_t i) {
    const double r = radius * static_cast<double>(i) / opt.radial_steps;
    double sp = 0.0;
    double sq = 0.0;
    if (i == 0) {
      // P'(0) = 0 and P(z)/z -> 0.
      ring_p_prime[i] = 0.0;
      ring_p_over_z[i] = 0.0;
      return;
    }
    for (int k = 0; k < opt.angular_steps; ++k) {
      const Complex z = std::polar(r, 2.0 * std::numbers::pi * k / opt.angular_steps);
      sp = std::max(sp, std::abs(eval_p_prime(c, z)));
      sq = std::max(sq, std::abs(eval_p_over_t(c, z)));
    }
    ring_p_prime[i] = sp;
    ring_p_over_z[i] = sq;
  });
  report.sup_p_prime = *std::max_element(ring_p_prime.begin(), ring_p_prime.end());
  report.sup_p_over_z = *std::max_element(ring_p_over_z.begin(), ring_p_over_z.end());

  std::mt19937_64 rng(opt.seed);
  auto draw = [&] {
    const double r = radius * std::sqrt(detail::unit_uniform(rng));
    const double theta = 2.0 * std::numbers::pi * detail::unit_uniform(rng);
    return std::polar(r, theta);
  };
  std::vector<std::pair<Complex, Complex>> pairs;
  pairs.reserve(opt.pair_samples);
  while (pairs.size() < opt.pair_samples) {
    const Complex z1 = draw();
    const Complex z2 = draw();
    if (z1 != z2) pairs.emplace_back(z1, z2);
  }
  const double margin = 1.0 - report.sup_p_prime;
  std::vector<unsigned char> bad(pairs.size(), 0);
  parallel_for(pairs.size(), opt.workers, [&](std::size_t i) {
    const auto [z1, z2] = pairs[i];
    const double lhs = std::abs(eval_q(c, z1) - eval_q(c, z2));
    bad[i] = lhs < margin * std::abs(z1 - z2) - tol.lipschitz ? 1 : 0;
  });
  report.pairs_checked = pairs.size();
  report.injectivity_violations = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
  return report;
}

}  // namespace convlab
