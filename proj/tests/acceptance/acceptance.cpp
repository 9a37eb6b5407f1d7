// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance and time limit is pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "convlab/convlab.hpp"
#include "oracles.hpp"

using namespace convlab;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Notes {
 public:
  template <class T>
  Notes& add(const std::string& key, T value) {
    if (!first_) out_ << ", ";
    first_ = false;
    out_ << key << '=' << value;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit;
  std::function<Outcome()> body;
};

CoeffVector monomial(int m) {
  std::vector<std::int64_t> a(static_cast<std::size_t>(m - 1), 0);
  a.back() = 1;
  return CoeffVector(a);
}

Outcome ac1() {
  double worst = 0.0;
  for (int m = 2; m <= 6; ++m) {
    const double expected = std::pow(static_cast<double>(m), -1.0 / (m - 1));
    worst = std::max(worst, std::abs(PolyQ(monomial(m)).t_q() - expected) / expected);
  }
  return {worst <= 1e-12, Notes().add("max_rel_err", worst).str()};
}

Outcome ac2() {
  const std::vector<int> catalan{1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786};
  const auto t = iterate_table(CoeffVector({1}), 12, 12);
  bool diag = true;
  for (std::size_t l = 1; l <= 12; ++l) diag = diag && t.m(l, l) == catalan[l - 1];
  std::mt19937_64 rng(2002);
  int agree = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = oracle::random_coeffs(rng, 6, 3);
    if (limit_series(c, 10).c == lagrange_inverse(c, 10).c) ++agree;
  }
  return {diag && agree == 50, Notes().add("catalan_diagonal", diag).add("series_agree", agree).add("of", 50).str()};
}

Outcome ac3() {
  std::mt19937_64 rng(3003);
  int audits = 0, bounds = 0;
  double worst_excess = -1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = oracle::random_coeffs(rng, 6, 3);
    const PolyQ p(c);
    const auto table = iterate_table(c, 8, 64);
    if (audit(table).all()) ++audits;
    const auto sums = mass_bound_certificate(table, p);
    bool ok = true;
    for (double s : sums) {
      worst_excess = std::max(worst_excess, s - p.t_q());
      ok = ok && s <= p.t_q() + 1e-12;
    }
    if (ok) ++bounds;
  }
  return {audits == 50 && bounds == 50,
          Notes().add("audits", audits).add("mass_bounds", bounds).add("max(sum - t_Q)", worst_excess).str()};
}

Outcome ac4() {
  std::mt19937_64 rng(4004);
  int good = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = oracle::random_coeffs(rng, 10, 5);
    const PolyQ p(c);
    const Complex z = qprime_roots(c).front();
    const double err = std::abs(z - Complex(p.t_q(), 0.0));
    worst = std::max(worst, err);
    if (z.imag() == 0.0 && z.real() > 0.0 && err <= 1e-10) ++good;
  }
  double worst_radius = 0.0;
  for (const auto& c : {CoeffVector({1}), CoeffVector({0, 1})}) {
    const double tq = PolyQ(c).t_q();
    worst_radius = std::max(worst_radius, std::abs(reciprocal_qprime(c, 64).radius_estimate - tq) / tq);
  }
  return {good == 100 && worst_radius <= 0.02,
          Notes().add("roots_ok", good).add("max_root_err", worst).add("radius_rel_err", worst_radius).str()};
}

Outcome ac5() {
  std::mt19937_64 rng(5005);
  int good = 0;
  double sup_pp = 0.0, sup_pz = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = oracle::random_coeffs(rng, 10, 5);
    ScanOptions opt;
    opt.seed = static_cast<std::uint64_t>(trial);
    opt.workers = worker_count_from_env();
    const auto r = disk_scan(PolyQ(c), opt);
    sup_pp = std::max(sup_pp, r.sup_p_prime);
    sup_pz = std::max(sup_pz, r.sup_p_over_z);
    if (r.sup_p_prime < 1.0 && r.sup_p_over_z < 1.0 && r.injectivity_violations == 0 && r.pairs_checked == 10000) {
      ++good;
    }
  }
  return {good == 20, Notes().add("certified", good).add("max_sup|P'|", sup_pp).add("max_sup|P/z|", sup_pz).str()};
}

Outcome ac6() {
  const Grid g(1, 16.0, 1024);
  const PolyQ p(CoeffVector({1}));
  const auto r = construct(gaussian_field(g, 0.5, 0.2), p);
  const double oracle_mass = (1.0 - std::sqrt(1.0 - 4.0 * 0.2)) / 2.0;
  const double mass_err = std::abs(l1_norm(r.limit) - oracle_mass);
  const double slack = verify_inequality(r.limit, p.coeffs()).min_slack;
  const double min_psi = min_value(r.limit);
  const bool ok = r.report.converged && mass_err <= 1e-6 && min_psi >= -1e-11 && slack >= -1e-10 &&
                  r.report.mass_shadow_error <= 1e-11;
  return {ok, Notes()
                  .add("iterations", r.report.iterations)
                  .add("mass_err", mass_err)
                  .add("min", min_psi)
                  .add("slack", slack)
                  .add("shadow", r.report.mass_shadow_error)
                  .str()};
}

Outcome ac7() {
  const Grid g(1, 64.0, 4096);
  const Field f = poisson_field({0.5, 1.0, g});
  const auto chk = check_two_fold(f);
  const auto neg = check_two_fold(poisson_field({0.6, 1.0, g}));
  const bool ok = chk.min_slack >= -1e-8 * l1_norm(f) && std::abs(chk.mass - 0.5) <= 1e-3 && neg.min_slack < 0.0;
  return {ok, Notes().add("slack", chk.min_slack).add("mass", chk.mass).add("control_slack", neg.min_slack).str()};
}

Outcome ac8() {
  const PolyQ two(CoeffVector({1}));
  double worst = uniqueness_roundtrip(poisson_field({0.3, 1.0, Grid(1, 64.0, 4096)}), two, 1e-12);
  const double witness_err = worst;
  const Grid g(1, 16.0, 1024);
  for (const auto& c : {CoeffVector({1}), CoeffVector({1, 1})}) {
    const PolyQ p(c);
    for (double target : {0.1, 0.15, 0.2}) {
      ConstructOptions opt;
      opt.tol = 1e-12;
      const auto built = construct(gaussian_field(g, 0.5, p.q(target)), p, opt);
      worst = std::max(worst, uniqueness_roundtrip(built.limit, p, 1e-12));
    }
  }
  return {worst <= 1e-5, Notes().add("witness_err", witness_err).add("max_err", worst).str()};
}

Outcome ac9() {
  const Grid g(1, 32.0, 2048);
  const BoseProblem pb{1, 1.0, 0.01, gaussian_field(g, 0.5, 0.1)};
  const auto sol = solve(pb, 1e-10, 1000);
  const auto cert = apriori_certificate(pb, sol);
  const double expected_f = pb.mu * integral(sol.u) / pb.xi;
  const double f_rel = std::abs(cert.f_mass - expected_f) / expected_f;

  const Grid small(1, 32.0, 256);
  const BoseProblem lin{1, 1.0, 0.0, gaussian_field(small, 0.5, 0.1)};
  const auto lsol = solve(lin, 1e-13, 1000);
  const auto n = static_cast<long>(small.points());
  const Eigen::MatrixXd r = oracle::dense_resolvent_1d(small.points(), small.extent(), lin.xi);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = lin.potential[static_cast<std::size_t>(i)];
  const Eigen::VectorXd u =
      (Eigen::MatrixXd::Identity(n, n) + r * v.asDiagonal()).partialPivLu().solve(r * v);
  double dense_l1 = 0.0;
  for (long i = 0; i < n; ++i) dense_l1 += std::abs(u(i) - lsol.u[static_cast<std::size_t>(i)]);
  dense_l1 *= small.spacing();

  const bool ok = sol.report.converged && sol.hypothesis_value < 1.0 &&
                  cert.min_u >= -1e-8 * l1_norm(sol.u) && cert.proof_slack >= -1e-8 * l1_norm(sol.u) &&
                  cert.proof_inequality && f_rel <= 1e-12 && dense_l1 <= 1e-8 &&
                  cert.verdict == CertificateVerdict::pass;
  return {ok, Notes()
                  .add("iterations", sol.report.iterations)
                  .add("hypothesis", sol.hypothesis_value)
                  .add("min_u", cert.min_u)
                  .add("proof_slack", cert.proof_slack)
                  .add("f_mass_rel", f_rel)
                  .add("dense_l1", dense_l1)
                  .str()};
}

Outcome ac10() {
  std::mt19937_64 rng(1010);
  int failures = 0;
  double worst_mass = 0.0, worst_comm = 0.0, worst_young = 0.0, worst_delta = 0.0;
  for (int dim = 1; dim <= 3; ++dim) {
    const Grid g(dim, 4.0, 64);
    const Field delta = Field::delta(g);
    for (int trial = 0; trial < 200; ++trial) {
      const Field f = oracle::random_smooth_field(g, rng, false);
      const Field p = oracle::random_smooth_field(g, rng, true);
      const double scale = l1_norm(f) * l1_norm(p);
      const Field fp = convolve(f, p);
      const double mass = std::abs(integral(fp) - integral(f) * integral(p)) / scale;
      const double comm = l1_diff(fp, convolve(p, f)) / scale;
      const double young = std::abs(l1_norm(convolve(p, p)) - l1_norm(p) * l1_norm(p)) / (l1_norm(p) * l1_norm(p));
      const double fmax = std::max(std::abs(max_value(f)), std::abs(min_value(f)));
      const double ident = linf_diff(convolve(delta, f), f) / fmax;
      worst_mass = std::max(worst_mass, mass);
      worst_comm = std::max(worst_comm, comm);
      worst_young = std::max(worst_young, young);
      worst_delta = std::max(worst_delta, ident);
      if (mass > 1e-12 || comm > 1e-12 || young > 1e-12 || ident > 1e-12) ++failures;
    }
  }
  return {failures == 0, Notes()
                             .add("failures", failures)
                             .add("mass", worst_mass)
                             .add("commute", worst_comm)
                             .add("young", worst_young)
                             .add("delta", worst_delta)
                             .str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "closed-form t_Q for a_m = 1", 1.0, ac1},
      {"AC2", "Catalan diagonal and table == Lagrange inverse", 10.0, ac2},
      {"AC3", "table items (i)-(iii) and mass-bound certificate", 30.0, ac3},
      {"AC4", "min-modulus root of Q' and root-test radius", 10.0, ac4},
      {"AC5", "disk certificates for P", 30.0, ac5},
      {"AC6", "constructor convergence and mass bound", 20.0, ac6},
      {"AC7", "Poisson witness f >= f * f", 10.0, ac7},
      {"AC8", "uniqueness round trip", 60.0, ac8},
      {"AC9", "Bose certificate and linear oracle", 60.0, ac9},
      {"AC10", "field algebra properties", 60.0, ac10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = out.ok && in_time;
    if (!pass) ++failed;
    std::printf("%-4s %s  %s [%s] (%.2f s, limit %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.title,
                out.detail.c_str(), secs, c.time_limit, in_time ? "" : ", TOO SLOW");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
