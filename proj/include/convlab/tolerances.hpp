#pragma once

namespace convlab {

/// Every numerical threshold used by the library lives here so that reports
/// can echo the exact values a run was judged against.
struct Tolerances {
  double relative = 1e-12;
  /// |Q'(t_Q)| target, scaled by max(1, sum n a_n).
  double critical_point = 1e-14;
  /// |Q'(root)| target for complex roots, scaled by sum n a_n.
  double root_residual = 1e-10;
  /// Inputs to the constructor may dip this far below zero before rejection.
  double negative_clamp = 1e-12;
  /// Relative slack on the seed-mass hypothesis ||psi||_1 <= Q(t_Q).
  double seed_mass = 1e-9;
  /// Pointwise slack on Psi_{j+1} >= Psi_j.
  double monotone = 1e-12;
  /// Relative slack (to the L1 norm) for non-negativity certificates.
  double certificate = 1e-8;
  /// Slack on the ceiling u <= 1 in the Bose problem.
  double ceiling = 1e-10;
  /// Additive slack on the sampled Lipschitz lower bound in the disk scan.
  double lipschitz = 1e-14;
  /// Additive slack on the per-row mass-bound certificate.
  double mass_bound = 1e-12;
};

inline constexpr Tolerances default_tolerances{};

}  // namespace convlab
