#pragma once

// The polynomial Q(t) = t - sum_{n=2}^N a_n t^n attached to an iterated
// convolution inequality f >= sum a_n (*^n f), its companion P = id - Q, and
// the unique positive critical point t_Q of Q.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convlab/errors.hpp"
#include "convlab/tolerances.hpp"

namespace convlab {

/// Non-negative integer weights a_2, ..., a_N.
class CoeffVector {
 public:
  /// `a[0]` is a_2, `a[k]` is a_{k+2}.
  explicit CoeffVector(std::vector<std::int64_t> a) : a_(std::move(a)) {
    if (a_.empty()) {
      throw Error(ErrorCode::invalid_coefficients, "need at least a_2 (N >= 2)");
    }
    for (std::size_t k = 0; k < a_.size(); ++k) {
      if (a_[k] < 0) {
        throw Error(ErrorCode::invalid_coefficients,
                    "a_" + std::to_string(k + 2) + " is negative");
      }
    }
    if (std::all_of(a_.begin(), a_.end(), [](std::int64_t v) { return v == 0; })) {
      throw Error(ErrorCode::invalid_coefficients, "all coefficients are zero");
    }
    for (std::size_t k = 0; k < a_.size(); ++k) {
      if (a_[k] > 0) {
        if (min_active_ == 0) min_active_ = static_cast<int>(k) + 2;
        max_active_ = static_cast<int>(k) + 2;
      }
    }
  }

  /// Parses "a2,a3,...,aN", e.g. "0,1" for a_2 = 0, a_3 = 1.
  static CoeffVector parse(std::string_view text) {
    std::vector<std::int64_t> out;
    while (true) {
      auto comma = text.find(',');
      auto token = text.substr(0, comma);
      while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
      while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
        throw Error(ErrorCode::invalid_coefficients,
                    "cannot parse coefficient '" + std::string(token) + "'");
      }
      out.push_back(value);
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    return CoeffVector(std::move(out));
  }

  /// N, the largest index carried (trailing zeros included).
  int degree_max() const noexcept { return static_cast<int>(a_.size()) + 1; }
  /// N_1 = min{n : a_n > 0}.
  int min_active() const noexcept { return min_active_; }
  /// N_2 = max{n : a_n > 0}.
  int max_active() const noexcept { return max_active_; }

  /// a_n, zero outside [2, N].
  std::int64_t operator[](int n) const noexcept {
    if (n < 2 || n > degree_max()) return 0;
    return a_[static_cast<std::size_t>(n - 2)];
  }

  std::span<const std::int64_t> values() const noexcept { return a_; }

  /// sum n a_n = P'(1).
  double derivative_weight() const noexcept {
    double s = 0.0;
    for (int n = 2; n <= degree_max(); ++n) s += static_cast<double>(n) * static_cast<double>((*this)[n]);
    return s;
  }

  friend bool operator==(const CoeffVector&, const CoeffVector&) = default;

 private:
  std::vector<std::int64_t> a_;
  int min_active_ = 0;
  int max_active_ = 0;
};

// Horner evaluation, generic over real and complex scalars.

/// P(t) = sum a_n t^n.
template <class T>
T eval_p(const CoeffVector& c, T t) {
  T acc{0};
  for (int n = c.max_active(); n >= 2; --n) acc = acc * t + T(static_cast<double>(c[n]));
  return acc * t * t;
}

/// P(t) / t, continuous at t = 0 with value 0.
template <class T>
T eval_p_over_t(const CoeffVector& c, T t) {
  T acc{0};
  for (int n = c.max_active(); n >= 2; --n) acc = acc * t + T(static_cast<double>(c[n]));
  return acc * t;
}

/// P'(t) = sum n a_n t^{n-1}.
template <class T>
T eval_p_prime(const CoeffVector& c, T t) {
  T acc{0};
  for (int n = c.max_active(); n >= 2; --n) {
    acc = acc * t + T(static_cast<double>(n) * static_cast<double>(c[n]));
  }
  return acc * t;
}

/// P''(t) = sum n (n-1) a_n t^{n-2}.
template <class T>
T eval_p_second(const CoeffVector& c, T t) {
  T acc{0};
  for (int n = c.max_active(); n >= 2; --n) {
    acc = acc * t + T(static_cast<double>(n) * (n - 1) * static_cast<double>(c[n]));
  }
  return acc;
}

template <class T>
T eval_q(const CoeffVector& c, T t) {
  return t - eval_p(c, t);
}

template <class T>
T eval_q_prime(const CoeffVector& c, T t) {
  return T(1.0) - eval_p_prime(c, t);
}

/// Locates the zero of Q' on (0, 1): Q'(0) = 1 > 0 and Q'(1) = 1 - sum n a_n <= -1,
/// and P' is strictly increasing on (0, inf), so the bracket holds exactly one root.
inline double locate_critical_point(const CoeffVector& c, int bisection_steps = 60) {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (eval_q_prime(c, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 100; ++i) {
    const double step = eval_q_prime(c, t) / -eval_p_second(c, t);
    double next = t - step;
    const bool newton = next >= lo && next <= hi;
    if (!newton) next = 0.5 * (lo + hi);
    if (newton && (next == t || std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * t)) {
      t = next;
      break;
    }
    if (eval_q_prime(c, next) > 0.0) {
      lo = next;
    } else {
      hi = next;
    }
    t = next;
  }
  return t;
}

/// Q together with its critical point t_Q and maximum Q(t_Q).
class PolyQ {
 public:
  explicit PolyQ(CoeffVector coeffs, const Tolerances& tol = default_tolerances)
      : coeffs_(std::move(coeffs)) {
    t_q_ = locate_critical_point(coeffs_);
    q_max_ = eval_q(coeffs_, t_q_);
    const double target = tol.critical_point * std::max(1.0, coeffs_.derivative_weight());
    if (!(std::abs(eval_q_prime(coeffs_, t_q_)) <= target) || !(t_q_ > 0.0 && t_q_ < 1.0)) {
      throw Error(ErrorCode::convergence_failure, "critical point of Q not resolved");
    }
  }

  const CoeffVector& coeffs() const noexcept { return coeffs_; }
  double t_q() const noexcept { return t_q_; }
  double q_max() const noexcept { return q_max_; }

  double q(double t) const { return eval_q(coeffs_, t); }
  double p(double t) const { return eval_p(coeffs_, t); }
  double p_prime(double t) const { return eval_p_prime(coeffs_, t); }
  double q_prime(double t) const { return eval_q_prime(coeffs_, t); }

 private:
  CoeffVector coeffs_;
  double t_q_ = 0.0;
  double q_max_ = 0.0;
};

inline PolyQ build_poly(const CoeffVector& coeffs) { return PolyQ(coeffs); }

}  // namespace convlab
