#pragma once

// Exact-integer bookkeeping for the iteration Psi_{j+1} = psi + sum a_n (*^n Psi_j).
// Writing Psi_j = sum_l m_{j,l} (*^l psi), each row m_{j,.} is a polynomial in a
// formal variable s (standing for psi) and the iteration becomes
//   row_{j+1}(s) = s + sum a_n row_j(s)^n.
// The diagonal m_{l,l} stabilizes to the compositional inverse of Q.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "convlab/errors.hpp"
#include "convlab/qpoly.hpp"
#include "convlab/tolerances.hpp"

namespace convlab {

using BigInt = boost::multiprecision::cpp_int;

/// Dense integer polynomial, index = degree.
using BigPoly = std::vector<BigInt>;

namespace detail {

/// (a * b) truncated at degree `cap`.
inline BigPoly truncated_product(const BigPoly& a, const BigPoly& b, std::size_t cap) {
  BigPoly out(cap + 1);
  for (std::size_t i = 0; i < a.size() && i <= cap; ++i) {
    if (a[i].is_zero()) continue;
    const std::size_t jmax = std::min(b.size() - 1, cap - i);
    for (std::size_t j = 0; j <= jmax && j < b.size(); ++j) {
      if (!b[j].is_zero()) out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

/// min(base^exp, limit) without overflow.
inline std::size_t saturating_pow(std::size_t base, std::size_t exp, std::size_t limit) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > limit / base) return limit;
    r *= base;
  }
  return std::min(r, limit);
}

/// Natural log of a positive big integer, safe beyond the double range.
inline double log_big(const BigInt& v) {
  const std::size_t bits = boost::multiprecision::msb(v);
  if (bits < 1000) return std::log(v.convert_to<double>());
  const std::size_t shift = bits - 60;
  const BigInt top = v >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

}  // namespace detail

/// Rows j = 0..J of m_{j,l}, stored for degrees l = 0..cap (l = 0 is always zero).
struct CoeffTable {
  CoeffVector coeffs;
  std::size_t cap = 0;
  std::vector<BigPoly> rows;
  /// N_2^J > cap: the highest rows lost terms above the cap. Stored entries are
  /// still exact since degree l only depends on degrees <= l.
  bool cap_too_small = false;

  std::size_t row_count() const noexcept { return rows.size(); }
  const BigInt& m(std::size_t j, std::size_t l) const { return rows.at(j).at(l); }
};

/// Iterates the row recursion J times in exact integers, truncating at `cap`.
inline CoeffTable iterate_table(const CoeffVector& coeffs, std::size_t rows_j, std::size_t cap) {
  if (cap < 1) throw Error(ErrorCode::invalid_argument, "cap must be >= 1");
  CoeffTable table{coeffs, cap, {}, false};
  table.rows.reserve(rows_j + 1);

  BigPoly row(cap + 1);
  row[1] = 1;
  table.rows.push_back(row);

  const int n2 = coeffs.max_active();
  for (std::size_t j = 0; j < rows_j; ++j) {
    BigPoly next(cap + 1);
    next[1] = 1;
    BigPoly power = row;
    for (int n = 2; n <= n2; ++n) {
      power = detail::truncated_product(power, row, cap);
      const auto a = coeffs[n];
      if (a == 0) continue;
      for (std::size_t l = 0; l <= cap; ++l) {
        if (!power[l].is_zero()) next[l] += a * power[l];
      }
    }
    row = std::move(next);
    table.rows.push_back(row);
  }
  const auto limit = std::numeric_limits<std::size_t>::max();
  table.cap_too_small =
      detail::saturating_pow(static_cast<std::size_t>(n2), rows_j, limit) > cap;
  return table;
}

/// Which of the structural properties of the table hold on its stored range.
struct TableAudit {
  bool seed_row = true;        // m_{0,1} = 1, m_{0,l} = 0 otherwise
  bool support = true;         // m_{j,l} = 0 for l >= N_2^j + 1
  bool monotone = true;        // m_{j+1,l} >= m_{j,l}
  bool stabilized = true;      // m_{j,l} = m_{j+1,l} for j >= l
  bool non_negative = true;

  bool all() const noexcept { return seed_row && support && monotone && stabilized && non_negative; }
};

inline TableAudit audit(const CoeffTable& table) {
  TableAudit out;
  const std::size_t cap = table.cap;
  const auto n2 = static_cast<std::size_t>(table.coeffs.max_active());
  for (std::size_t l = 0; l <= cap; ++l) {
    if (table.rows[0][l] != (l == 1 ? 1 : 0)) out.seed_row = false;
  }
  for (std::size_t j = 0; j < table.rows.size(); ++j) {
    const std::size_t bound = detail::saturating_pow(n2, j, cap + 1);
    for (std::size_t l = 0; l <= cap; ++l) {
      const BigInt& v = table.rows[j][l];
      if (v < 0) out.non_negative = false;
      if (l >= bound + 1 && !v.is_zero()) out.support = false;
      if (j + 1 < table.rows.size()) {
        const BigInt& w = table.rows[j + 1][l];
        if (w < v) out.monotone = false;
        if (j >= l && w != v) out.stabilized = false;
      }
    }
  }
  return out;
}

/// Coefficients c_l of the power series C(s) = sum c_l s^l with Q(C(s)) = s.
struct LimitSeries {
  CoeffVector coeffs;
  /// Index = degree; c[0] = 0, c[1] = 1.
  BigPoly c;

  std::size_t order() const noexcept { return c.empty() ? 0 : c.size() - 1; }
};

/// Reads c_l = m_{l,l} off a table iterated to J = L.
inline LimitSeries limit_series(const CoeffVector& coeffs, std::size_t order) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be >= 1");
  const CoeffTable table = iterate_table(coeffs, order, order);
  BigPoly c(order + 1);
  for (std::size_t l = 1; l <= order; ++l) c[l] = table.m(l, l);
  return {coeffs, std::move(c)};
}

/// Compositional inverse of Q by the Lagrange inversion formula
///   c_l = (1/l) [t^{l-1}] (1 - P(t)/t)^{-l},
/// computed independently of the table recursion.
inline LimitSeries lagrange_inverse(const CoeffVector& coeffs, std::size_t order) {
  if (order < 1) throw Error(ErrorCode::invalid_argument, "order must be >= 1");
  const std::size_t deg = order - 1;

  // h = 1 / (1 - r), r(t) = P(t)/t = sum a_{i+1} t^i.
  BigPoly h(deg + 1);
  h[0] = 1;
  for (std::size_t k = 1; k <= deg; ++k) {
    for (std::size_t i = 1; i <= k; ++i) {
      const auto a = coeffs[static_cast<int>(i) + 1];
      if (a != 0) h[k] += a * h[k - i];
    }
  }

  BigPoly c(order + 1);
  BigPoly power(deg + 1);
  power[0] = 1;
  for (std::size_t l = 1; l <= order; ++l) {
    power = detail::truncated_product(power, h, deg);
    const BigInt& numerator = power[l - 1];
    BigInt q, r;
    boost::multiprecision::divide_qr(numerator, BigInt(l), q, r);
    if (!r.is_zero()) throw Error(ErrorCode::convergence_failure, "non-integral Lagrange coefficient");
    c[l] = q;
  }
  return {coeffs, std::move(c)};
}

/// Q(C(s)) - s truncated at the series order; identically zero for an exact inverse.
inline BigPoly inverse_defect(const LimitSeries& series) {
  const std::size_t cap = series.order();
  BigPoly out = series.c;
  out.resize(cap + 1);
  if (cap >= 1) out[1] -= 1;
  BigPoly power = series.c;
  for (int n = 2; n <= series.coeffs.max_active(); ++n) {
    power = detail::truncated_product(power, series.c, cap);
    const auto a = series.coeffs[n];
    if (a == 0) continue;
    for (std::size_t l = 0; l <= cap; ++l) out[l] -= a * power[l];
  }
  return out;
}

/// s_j = sum_l m_{j,l} Q(t_Q)^l per row: the mass of Psi_j for a seed of critical mass.
inline std::vector<double> mass_bound_certificate(const CoeffTable& table, const PolyQ& poly) {
  if (!(table.coeffs == poly.coeffs())) {
    throw Error(ErrorCode::invalid_argument, "table and polynomial use different coefficients");
  }
  const double q = poly.q_max();
  std::vector<double> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    double s = 0.0;
    double ql = 1.0;
    for (std::size_t l = 1; l < row.size(); ++l) {
      ql *= q;
      if (!row[l].is_zero()) s += row[l].convert_to<double>() * ql;
    }
    out.push_back(s);
  }
  return out;
}

/// Power series of 1/Q'(t) = sum_k P'(t)^k and its root-test radius estimate.
struct ReciprocalSeries {
  BigPoly exact;
  std::vector<double> b;
  double radius_estimate = 0.0;
};

inline ReciprocalSeries reciprocal_qprime(const CoeffVector& coeffs, std::size_t order) {
  if (order < 8) throw Error(ErrorCode::invalid_argument, "order must be >= 8");

  BigPoly pprime(order + 1);
  for (int n = 2; n <= coeffs.max_active(); ++n) {
    if (static_cast<std::size_t>(n - 1) <= order) pprime[static_cast<std::size_t>(n - 1)] = n * coeffs[n];
  }

  BigPoly acc(order + 1);
  acc[0] = 1;
  BigPoly term = acc;
  // P'(t)^k has lowest degree k (N_1 - 1) >= k, so order+1 powers suffice.
  for (std::size_t k = 1; k <= order; ++k) {
    term = detail::truncated_product(term, pprime, order);
    if (std::all_of(term.begin(), term.end(), [](const BigInt& v) { return v.is_zero(); })) break;
    for (std::size_t i = 0; i <= order; ++i) acc[i] += term[i];
  }

  ReciprocalSeries out;
  out.b.reserve(order + 1);
  for (const auto& v : acc) out.b.push_back(v.convert_to<double>());

  // Root test over the tail window: limsup b_nu^{1/nu} ~ max over the last L/4 terms.
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t window = std::max<std::size_t>(1, order / 4);
  for (std::size_t nu = order - window + 1; nu <= order; ++nu) {
    if (acc[nu].is_zero()) continue;
    best = std::max(best, detail::log_big(acc[nu]) / static_cast<double>(nu));
  }
  out.radius_estimate = std::exp(-best);
  out.exact = std::move(acc);
  return out;
}

}  // namespace convlab
