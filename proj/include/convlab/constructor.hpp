#pragma once

// Iterative construction of solutions of psi = Psi - sum a_n (*^n Psi) from a
// non-negative seed psi, and the checks that tie arbitrary solutions of the
// inequality f >= sum a_n (*^n f) back to it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "convlab/errors.hpp"
#include "convlab/field.hpp"
#include "convlab/qpoly.hpp"
#include "convlab/tolerances.hpp"

namespace convlab {

struct SolveReport {
  std::size_t iterations = 0;
  /// ||Psi_{j+1} - Psi_j||_1 per step.
  std::vector<double> l1_deltas;
  /// Integral of each iterate, starting with the seed.
  std::vector<double> masses;
  /// Largest relative gap between the iterate masses and the scalar recursion
  /// sigma_{j+1} = int psi + P(sigma_j).
  double mass_shadow_error = 0.0;
  double final_mass = 0.0;
  /// ||psi - (Psi - sum a_n Psi^{*n})||_1 for the returned iterate.
  double residual = 0.0;
  bool monotone_ok = true;
  bool converged = false;
};

struct Construction {
  Field limit;
  SolveReport report;
};

using NotConvergedError = SolveError<Construction>;

struct ConstructOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  Tolerances tolerances = default_tolerances;
};

/// Zeroes values in [-threshold, 0); anything lower is rejected.
inline Field clamp_small_negatives(const Field& f, double threshold) {
  if (min_value(f) < -threshold) {
    throw Error(ErrorCode::invalid_argument,
                "field has values below -" + std::to_string(threshold));
  }
  return f.map([](double v) { return v < 0.0 ? 0.0 : v; });
}

/// Psi_0 = psi, Psi_{j+1} = psi + sum a_n (*^n Psi_j), stopped on the L1 increment.
inline Construction construct(const Field& psi_in, const PolyQ& poly, const ConstructOptions& opt = {}) {
  const Tolerances& tol = opt.tolerances;
  const CoeffVector& coeffs = poly.coeffs();
  const Field psi = clamp_small_negatives(psi_in, tol.negative_clamp);
  const double seed_mass = l1_norm(psi);
  if (seed_mass > poly.q_max() * (1.0 + tol.seed_mass)) {
    throw Error(ErrorCode::mass_too_large,
                "seed mass " + std::to_string(seed_mass) + " exceeds Q(t_Q) = " + std::to_string(poly.q_max()));
  }

  SolveReport report;
  const double sigma0 = integral(psi);
  double sigma = sigma0;
  Field current = psi;
  report.masses.push_back(integral(current));

  auto shadow = [&](double mass, double expected) {
    const double gap = std::abs(mass - expected);
    const double rel = expected > 0.0 ? gap / expected : gap;
    report.mass_shadow_error = std::max(report.mass_shadow_error, rel);
  };

  while (report.iterations < opt.max_iter) {
    Field next = psi + apply_p(current, coeffs);
    ++report.iterations;
    if (min_value(next - current) < -tol.monotone) report.monotone_ok = false;
    const double delta = l1_diff(next, current);
    report.l1_deltas.push_back(delta);
    sigma = sigma0 + eval_p(coeffs, sigma);
    const double mass = integral(next);
    report.masses.push_back(mass);
    shadow(mass, sigma);
    current = std::move(next);
    if (delta < opt.tol) {
      report.converged = true;
      break;
    }
  }

  report.final_mass = l1_norm(current);
  report.residual = l1_diff(psi, current - apply_p(current, coeffs));
  Construction result{std::move(current), std::move(report)};
  if (!result.report.converged) {
    throw NotConvergedError(ErrorCode::not_converged,
                            "no convergence after " + std::to_string(opt.max_iter) + " iterations", std::move(result));
  }
  return result;
}

struct InequalityCheck {
  /// min over the grid of f - sum a_n (*^n f).
  double min_slack = 0.0;
  double mass = 0.0;
};

inline InequalityCheck verify_inequality(const Field& f, const CoeffVector& coeffs) {
  return {min_value(f - apply_p(f, coeffs)), integral(f)};
}

/// Recovers psi := f - sum a_n (*^n f) from a solution f of the inequality,
/// rebuilds Psi from psi and returns ||f - Psi||_1.
inline double uniqueness_roundtrip(const Field& f, const PolyQ& poly, double tol,
                                   std::size_t max_iter = 10000) {
  if (integral(f) < 0.0) throw Error(ErrorCode::invalid_argument, "field has negative integral");
  const Field psi = clamp_small_negatives(f - apply_p(f, poly.coeffs()), tol);
  ConstructOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  // psi has mass Q(int f) <= Q(t_Q); the clamp above already absorbed roundoff.
  opt.tolerances.negative_clamp = tol;
  const Construction built = construct(psi, poly, opt);
  return l1_diff(f, built.limit);
}

}  // namespace convlab
