#pragma once

// Euclidean periodic-grid version of the integro-differential equation
//   (-Laplacian + xi)^m u = V (1 - u) + mu (*^{m+1} u),
// solved by Picard iteration through the spectral resolvent, and the a-priori
// non-negativity certificate attached to it.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "convlab/constructor.hpp"
#include "convlab/errors.hpp"
#include "convlab/field.hpp"
#include "convlab/tolerances.hpp"

namespace convlab {

struct BoseProblem {
  int m = 1;
  double xi = 1.0;
  double mu = 0.0;
  Field potential;

  const Grid& grid() const noexcept { return potential.grid(); }

  void validate(const Tolerances& tol = default_tolerances) const {
    if (m < 1) throw Error(ErrorCode::invalid_argument, "m must be a positive integer");
    if (!(xi > 0.0)) throw Error(ErrorCode::invalid_argument, "xi must be positive");
    if (!(mu >= 0.0)) throw Error(ErrorCode::invalid_argument, "mu must be non-negative");
    if (min_value(potential) < -tol.negative_clamp) {
      throw Error(ErrorCode::invalid_argument, "potential must be non-negative");
    }
  }
};

struct BoseSolution {
  Field u;
  /// 1 / int u (infinite when int u = 0).
  double delta = 0.0;
  /// mu^{1/m} / (xi delta) = mu^{1/m} int u / xi.
  double hypothesis_value = 0.0;
  /// ||u - R^m[V(1-u)] - mu R^m[*^{m+1} u]||_1.
  double pde_residual = 0.0;
  SolveReport report;
};

using BoseSolveError = SolveError<BoseSolution>;

/// (xi - Laplacian)^{-m} f via the multiplier (xi + 4 pi^2 |nu|^2)^{-m}.
inline Field resolvent_apply(const Field& f, double xi, int m) {
  if (!(xi > 0.0)) throw Error(ErrorCode::invalid_argument, "xi must be positive");
  if (m < 1) throw Error(ErrorCode::invalid_order, "resolvent power must be >= 1");
  constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  return spectral_map(f, [xi, m](Complex w, double nu2) {
    return w * std::pow(xi + four_pi2 * nu2, -m);
  });
}

namespace detail {

/// R^m[V(1-u)] + (*^m f) * u with f = mu^{1/m} R[u].
inline Field bose_update(const BoseProblem& pb, const Field& u) {
  Field linear = resolvent_apply(pb.potential * u.map([](double v) { return 1.0 - v; }), pb.xi, pb.m);
  if (pb.mu == 0.0) return linear;
  const Field f = resolvent_apply(u, pb.xi, 1).scaled(std::pow(pb.mu, 1.0 / pb.m));
  return linear + convolve(conv_power(f, pb.m), u);
}

inline void fill_derived(const BoseProblem& pb, BoseSolution& sol) {
  const double mass = integral(sol.u);
  sol.delta = mass == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / mass;
  sol.hypothesis_value = std::pow(pb.mu, 1.0 / pb.m) * mass / pb.xi;
  sol.pde_residual = l1_diff(sol.u, bose_update(pb, sol.u));
  sol.report.final_mass = mass;
  sol.report.residual = sol.pde_residual;
}

}  // namespace detail

/// Picard iteration from u_0 = 0 without relaxation.
inline BoseSolution solve(const BoseProblem& pb, double tol, std::size_t max_iter,
                          const Tolerances& tols = default_tolerances) {
  pb.validate(tols);
  if (!(integral(pb.potential) / std::pow(pb.xi, pb.m) < 0.5)) {
    throw Error(ErrorCode::invalid_argument, "smallness guard int V / xi^m < 0.5 violated");
  }

  BoseSolution sol{Field(pb.grid()), 0.0, 0.0, 0.0, {}};
  SolveReport& rep = sol.report;
  rep.masses.push_back(0.0);
  while (rep.iterations < max_iter) {
    Field next = detail::bose_update(pb, sol.u);
    ++rep.iterations;
    if (min_value(next - sol.u) < -tols.monotone) rep.monotone_ok = false;
    const double delta = l1_diff(next, sol.u);
    rep.l1_deltas.push_back(delta);
    rep.masses.push_back(integral(next));
    sol.u = std::move(next);
    if (delta < tol) {
      rep.converged = true;
      break;
    }
  }
  detail::fill_derived(pb, sol);

  if (!rep.converged) {
    throw BoseSolveError(ErrorCode::not_converged,
                         "Picard iteration did not converge in " + std::to_string(max_iter) + " steps", std::move(sol));
  }
  if (max_value(sol.u) > 1.0 + tols.ceiling) {
    throw BoseSolveError(ErrorCode::ceiling_violated, "converged u exceeds 1", std::move(sol));
  }
  return sol;
}

enum class CertificateVerdict { pass, fail, not_applicable };

constexpr std::string_view to_string(CertificateVerdict v) noexcept {
  switch (v) {
    case CertificateVerdict::pass: return "pass";
    case CertificateVerdict::fail: return "fail";
    case CertificateVerdict::not_applicable: return "not_applicable";
  }
  return "unknown";
}

struct CertificateResult {
  CertificateVerdict verdict = CertificateVerdict::not_applicable;
  double hypothesis_value = 0.0;
  /// (i) mu^{1/m} / (xi delta) < 1
  bool hypothesis = false;
  /// (ii) f >= *^{m+1} f up to the certificate tolerance
  bool proof_inequality = false;
  /// (iii) u >= 0 up to the certificate tolerance
  bool non_negative = false;
  /// u <= 1 (the theorem's standing assumption).
  bool ceiling = false;
  double proof_slack = 0.0;
  double min_u = 0.0;
  double f_mass = 0.0;
  double negative_part = 0.0;
};

/// Checks hypothesis => (f >= *^{m+1} f and u >= 0) on a converged solution,
/// with f := mu^{1/m} R[u].
inline CertificateResult apriori_certificate(const BoseProblem& pb, const BoseSolution& sol,
                                             const Tolerances& tol = default_tolerances) {
  CertificateResult out;
  const Field f = resolvent_apply(sol.u, pb.xi, 1).scaled(std::pow(pb.mu, 1.0 / pb.m));
  out.hypothesis_value = sol.hypothesis_value;
  out.hypothesis = sol.hypothesis_value < 1.0;
  out.ceiling = max_value(sol.u) <= 1.0 + tol.ceiling;
  out.f_mass = integral(f);
  out.proof_slack = min_value(f - conv_power(f, pb.m + 1));
  out.proof_inequality = out.proof_slack >= -tol.certificate * l1_norm(f);
  out.min_u = min_value(sol.u);
  out.non_negative = out.min_u >= -tol.certificate * l1_norm(sol.u);
  out.negative_part = negative_part_l1(sol.u);

  if (!out.hypothesis || !out.ceiling) {
    out.verdict = CertificateVerdict::not_applicable;
  } else {
    out.verdict = (out.proof_inequality && out.non_negative) ? CertificateVerdict::pass : CertificateVerdict::fail;
  }
  return out;
}

}  // namespace convlab
