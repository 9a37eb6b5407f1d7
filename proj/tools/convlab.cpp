// convlab command-line driver. Every run prints a JSON summary on stdout,
// writes its artifacts atomically and leaves a manifest next to them.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "convlab/convlab.hpp"

namespace fs = std::filesystem;
using namespace convlab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_failed = 3;

struct GridArgs {
  int dim = 1;
  double extent = 16.0;
  std::size_t points = 1024;

  void add_to(CLI::App* app) {
    app->add_option("--dim", dim, "Spatial dimension (1, 2 or 3)")->capture_default_str();
    app->add_option("--extent", extent, "Box side length L")->capture_default_str();
    app->add_option("--points", points, "Nodes per axis, a power of two >= 16")->capture_default_str();
  }
  Grid grid() const { return Grid(dim, extent, points); }
  json to_json() const { return {{"dim", dim}, {"extent", extent}, {"points", points}}; }
};

/// "gaussian:sigma=0.5,mass=0.2", "delta:mass=0.1", "zero" or "file:<path>".
Field parse_field_spec(const std::string& spec, const Grid& g) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "file") return load_field(rest);

  std::map<std::string, double> kv;
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::invalid_argument, "malformed field parameter '" + item + "'");
    try {
      kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "malformed field parameter '" + item + "'");
    }
  }
  auto get = [&](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  if (kind == "zero") return Field(g);
  if (kind == "delta") return Field::delta(g, get("mass", 1.0));
  if (kind == "gaussian") return gaussian_field(g, get("sigma", 0.5), get("mass", 1.0));
  throw Error(ErrorCode::invalid_argument, "unknown field kind '" + kind + "'");
}

void write_json(const fs::path& path, const json& j) {
  write_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

/// State shared by all subcommands of one invocation.
struct Run {
  std::string subcommand;
  json config = json::object();
  json outputs = json::array();
  std::string manifest;

  void emit(const std::string& path, const json& j) {
    if (path.empty()) return;
    write_json(path, j);
    outputs.push_back(path);
  }
  void emit(const std::string& path, const Field& f) {
    if (path.empty()) return;
    save_field(path, f);
    outputs.push_back(path);
  }

  fs::path manifest_path() const {
    if (!manifest.empty()) return manifest;
    if (!outputs.empty()) return outputs.front().get<std::string>() + ".manifest.json";
    return "convlab_" + subcommand + ".manifest.json";
  }
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

// --- subcommands -------------------------------------------------------------

struct TqArgs {
  std::string coeffs;
  std::string out;
};

int run_tq(const TqArgs& a, Run& run) {
  run.config = {{"coeffs", a.coeffs}, {"out", a.out}};
  const PolyQ p(CoeffVector::parse(a.coeffs));
  const json result{{"t_q", p.t_q()}, {"q_max", p.q_max()}};
  run.emit(a.out, result);
  print(result);
  return exit_ok;
}

struct SeriesArgs {
  std::string coeffs;
  std::size_t rows = 8;
  std::size_t cap = 64;
  std::size_t reciprocal = 0;
  std::string out;
};

int run_series(const SeriesArgs& a, Run& run) {
  run.config = {{"coeffs", a.coeffs}, {"rows", a.rows}, {"cap", a.cap}, {"reciprocal", a.reciprocal}, {"out", a.out}};
  const CoeffVector c = CoeffVector::parse(a.coeffs);
  const PolyQ p(c);
  const CoeffTable table = iterate_table(c, a.rows, a.cap);
  const TableAudit au = audit(table);

  BigPoly diagonal;
  for (std::size_t l = 1; l <= std::min(a.rows, a.cap); ++l) diagonal.push_back(table.m(l, l));
  const LimitSeries lagrange = lagrange_inverse(c, a.rows);

  json result{{"coeffs", to_json(c)},
              {"t_q", p.t_q()},
              {"q_max", p.q_max()},
              {"diagonal", big_to_json(diagonal)},
              {"lagrange", big_to_json(BigPoly(lagrange.c.begin() + 1, lagrange.c.end()))},
              {"audit",
               {{"seed_row", au.seed_row},
                {"support", au.support},
                {"monotone", au.monotone},
                {"stabilized", au.stabilized},
                {"non_negative", au.non_negative}}},
              {"mass_bound", mass_bound_certificate(table, p)},
              {"table", to_json(table)}};
  if (a.reciprocal > 0) {
    const ReciprocalSeries r = reciprocal_qprime(c, a.reciprocal);
    result["reciprocal_qprime"] = {{"b", big_to_json(r.exact)}, {"radius_estimate", r.radius_estimate}};
  }
  run.emit(a.out, result);
  if (a.out.empty()) {
    print(result);
  } else {
    print({{"diagonal", result["diagonal"]}, {"audit", result["audit"]}, {"out", a.out}});
  }
  return au.all() ? exit_ok : exit_failed;
}

struct DiskArgs {
  std::string coeffs;
  ScanOptions scan;
  std::string out;
};

int run_disk(DiskArgs a, Run& run) {
  a.scan.workers = worker_count_from_env();
  run.config = {{"coeffs", a.coeffs},
                {"radial_steps", a.scan.radial_steps},
                {"angular_steps", a.scan.angular_steps},
                {"pairs", a.scan.pair_samples},
                {"seed", a.scan.seed},
                {"radius_factor", a.scan.radius_factor},
                {"out", a.out}};
  const PolyQ p(CoeffVector::parse(a.coeffs));
  const DiskReport r = disk_scan(p, a.scan);
  json result = to_json(r);
  const bool ok = r.sup_p_prime < 1.0 && r.sup_p_over_z < 1.0 && r.injectivity_violations == 0;
  result["certified"] = ok;
  run.emit(a.out, result);
  print(result);
  return ok ? exit_ok : exit_failed;
}

struct ConstructArgs {
  std::string coeffs;
  GridArgs grid;
  std::string psi = "gaussian:sigma=0.5,mass=0.2";
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  std::string out;
  std::string report;
};

int run_construct(const ConstructArgs& a, Run& run) {
  run.config = {{"coeffs", a.coeffs}, {"grid", a.grid.to_json()}, {"psi", a.psi},   {"tol", a.tol},
                {"max_iter", a.max_iter}, {"out", a.out},         {"report", a.report}};
  const CoeffVector c = CoeffVector::parse(a.coeffs);
  const PolyQ p(c);
  const Field psi = parse_field_spec(a.psi, a.grid.grid());
  ConstructOptions opt;
  opt.tol = a.tol;
  opt.max_iter = a.max_iter;

  auto describe = [&](const Construction& built) {
    const InequalityCheck chk = verify_inequality(built.limit, c);
    return json{{"coeffs", to_json(c)},
                {"t_q", p.t_q()},
                {"q_max", p.q_max()},
                {"seed_mass", integral(psi)},
                {"min_value", min_value(built.limit)},
                {"inequality", {{"min_slack", chk.min_slack}, {"mass", chk.mass}}},
                {"report", to_json(built.report)}};
  };

  try {
    const Construction built = construct(psi, p, opt);
    const json result = describe(built);
    run.emit(a.out, built.limit);
    run.emit(a.report, result);
    print({{"converged", true}, {"iterations", built.report.iterations}, {"final_mass", built.report.final_mass}});
    return exit_ok;
  } catch (const NotConvergedError& e) {
    json result = describe(e.payload());
    result["error"] = e.what();
    run.emit(a.report, result);
    std::cerr << "convlab: " << e.what() << '\n';
    print({{"converged", false}, {"iterations", e.payload().report.iterations}});
    return exit_failed;
  }
}

struct WitnessArgs {
  double a = 0.5;
  double t = 1.0;
  GridArgs grid{1, 64.0, 4096};
  std::string sampling = "periodized";
  std::string out;
  std::string report;
};

int run_witness(const WitnessArgs& a, Run& run) {
  run.config = {{"a", a.a},           {"t", a.t},     {"grid", a.grid.to_json()}, {"sampling", a.sampling},
                {"out", a.out}, {"report", a.report}};
  const PoissonParams params{a.a, a.t, a.grid.grid()};
  const auto sampling = a.sampling == "truncated" ? PoissonSampling::truncated : PoissonSampling::periodized;
  const Field f = poisson_field(params, sampling);
  const TwoFoldCheck chk = check_two_fold(f);
  const bool holds = chk.min_slack >= -1e-8 * l1_norm(f);
  const json result{{"a", a.a},
                    {"t", a.t},
                    {"in_family", params.in_family()},
                    {"min_slack", chk.min_slack},
                    {"mass", chk.mass},
                    {"l1_norm", l1_norm(f)},
                    {"inequality_holds", holds}};
  run.emit(a.out, f);
  run.emit(a.report, result);
  print(result);
  return (params.in_family() && !holds) ? exit_failed : exit_ok;
}

struct BoseArgs {
  int m = 1;
  double xi = 1.0;
  double mu = 0.01;
  std::string potential = "gaussian:sigma=0.5,mass=0.1";
  GridArgs grid{1, 32.0, 2048};
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  std::string out;
  std::string report;
};

int run_bose(const BoseArgs& a, Run& run) {
  run.config = {{"m", a.m},          {"xi", a.xi},           {"mu", a.mu},         {"V", a.potential},
                {"grid", a.grid.to_json()}, {"tol", a.tol}, {"max_iter", a.max_iter}, {"out", a.out},
                {"report", a.report}};
  const BoseProblem pb{a.m, a.xi, a.mu, parse_field_spec(a.potential, a.grid.grid())};

  auto finish = [&](const BoseSolution& sol, const std::string& error) {
    json result{{"solution", to_json(sol)}};
    int code = exit_ok;
    if (error.empty()) {
      const CertificateResult cert = apriori_certificate(pb, sol);
      result["certificate"] = to_json(cert);
      if (cert.verdict == CertificateVerdict::fail) code = exit_failed;
      run.emit(a.out, sol.u);
    } else {
      result["error"] = error;
      code = exit_failed;
    }
    run.emit(a.report, result);
    print(result.contains("certificate")
              ? json{{"converged", sol.report.converged}, {"verdict", result["certificate"]["verdict"]}}
              : json{{"converged", sol.report.converged}, {"error", error}});
    return code;
  };

  try {
    return finish(solve(pb, a.tol, a.max_iter), "");
  } catch (const BoseSolveError& e) {
    std::cerr << "convlab: " << e.what() << '\n';
    return finish(e.payload(), e.what());
  }
}

struct VerifyArgs {
  std::string field;
  std::string coeffs = "1";
  double tol = 1e-8;
  std::string out;
};

int run_verify(const VerifyArgs& a, Run& run) {
  run.config = {{"field", a.field}, {"coeffs", a.coeffs}, {"tol", a.tol}, {"out", a.out}};
  const CoeffVector c = CoeffVector::parse(a.coeffs);
  const PolyQ p(c);
  const Field f = load_field(a.field);
  const InequalityCheck chk = verify_inequality(f, c);
  const double scale = l1_norm(f);
  const bool inequality = chk.min_slack >= -a.tol * scale;
  const bool mass_bound = chk.mass <= p.t_q() + a.tol;
  const bool non_negative = min_value(f) >= -a.tol * scale;
  const json result{{"coeffs", to_json(c)},
                    {"t_q", p.t_q()},
                    {"min_slack", chk.min_slack},
                    {"mass", chk.mass},
                    {"l1_norm", scale},
                    {"min_value", min_value(f)},
                    {"inequality", inequality},
                    {"mass_bound", mass_bound},
                    {"non_negative", non_negative}};
  run.emit(a.out, result);
  print(result);
  return (inequality && !(mass_bound && non_negative)) ? exit_failed : exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convlab: numerical lab for the convolution inequality f >= sum a_n (*^n f)"};
  app.set_version_flag("--version", std::string(CONVLAB_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  Run run;
  app.add_option("--manifest", run.manifest, "Manifest path (default: next to the first output)");

  TqArgs tq;
  auto* tq_cmd = app.add_subcommand("tq", "Critical point t_Q of Q(t) = t - sum a_n t^n and the mass bound Q(t_Q)");
  tq_cmd->add_option("--coeffs", tq.coeffs, "Comma list a_2,a_3,...,a_N")->required();
  tq_cmd->add_option("--out", tq.out, "JSON output path");

  SeriesArgs se;
  auto* se_cmd = app.add_subcommand(
      "series", "Coefficient table m_{j,l} of Psi_j = sum_l m_{j,l} (*^l psi) and the limit series of Q^{-1}");
  se_cmd->add_option("--coeffs", se.coeffs, "Comma list a_2,a_3,...,a_N")->required();
  se_cmd->add_option("--rows", se.rows, "Iterations j of the table")->capture_default_str();
  se_cmd->add_option("--cap", se.cap, "Truncation degree in s")->capture_default_str();
  se_cmd->add_option("--reciprocal", se.reciprocal, "Also expand 1/Q' to this order (>= 8)");
  se_cmd->add_option("--out", se.out, "JSON output path");

  DiskArgs dk;
  auto* dk_cmd = app.add_subcommand(
      "disk", "Roots of Q' and the contraction/injectivity certificates for P on the disk |z| < t_Q");
  dk_cmd->add_option("--coeffs", dk.coeffs, "Comma list a_2,a_3,...,a_N")->required();
  dk_cmd->add_option("--seed", dk.scan.seed, "Seed for the random pair sample")->capture_default_str();
  dk_cmd->add_option("--radial", dk.scan.radial_steps, "Radial grid steps")->capture_default_str();
  dk_cmd->add_option("--angular", dk.scan.angular_steps, "Angular grid steps")->capture_default_str();
  dk_cmd->add_option("--pairs", dk.scan.pair_samples, "Random pairs for the injectivity check")->capture_default_str();
  dk_cmd->add_option("--radius-factor", dk.scan.radius_factor, "Scan radius as a multiple of t_Q")
      ->capture_default_str();
  dk_cmd->add_option("--out", dk.out, "JSON output path");

  ConstructArgs co;
  auto* co_cmd = app.add_subcommand(
      "construct", "Build Psi = lim Psi_j, Psi_{j+1} = psi + sum a_n (*^n Psi_j), solving Psi - sum a_n (*^n Psi) = psi");
  co_cmd->add_option("--coeffs", co.coeffs, "Comma list a_2,a_3,...,a_N")->required();
  co.grid.add_to(co_cmd);
  co_cmd->add_option("--psi", co.psi, "Seed: gaussian:sigma=S,mass=M | delta:mass=M | zero | file:PATH")
      ->capture_default_str();
  co_cmd->add_option("--tol", co.tol, "Stopping tolerance on ||Psi_{j+1} - Psi_j||_1")->capture_default_str();
  co_cmd->add_option("--max-iter", co.max_iter, "Iteration limit")->capture_default_str();
  co_cmd->add_option("--out", co.out, "Field output (.csv for d = 1, CVLF binary otherwise)");
  co_cmd->add_option("--report", co.report, "JSON report path");

  WitnessArgs wi;
  auto* wi_cmd = app.add_subcommand(
      "witness", "Poisson-kernel witness f_{a,t}, the transform of a exp(-2 pi t |x|), and its check f >= f * f");
  wi_cmd->add_option("--a", wi.a, "Amplitude a")->capture_default_str();
  wi_cmd->add_option("--t", wi.t, "Scale t")->capture_default_str();
  wi.grid.add_to(wi_cmd);
  wi_cmd->add_option("--sampling", wi.sampling, "periodized | truncated")
      ->check(CLI::IsMember({"periodized", "truncated"}))
      ->capture_default_str();
  wi_cmd->add_option("--out", wi.out, "Field output (.csv for d = 1, CVLF binary otherwise)");
  wi_cmd->add_option("--report", wi.report, "JSON report path");

  BoseArgs bo;
  auto* bo_cmd = app.add_subcommand(
      "bose", "Picard solve of (xi - Laplacian)^m u = V(1 - u) + mu (*^{m+1} u) and its non-negativity certificate");
  bo_cmd->add_option("--m", bo.m, "Resolvent power m")->capture_default_str();
  bo_cmd->add_option("--xi", bo.xi, "Spectral shift xi")->capture_default_str();
  bo_cmd->add_option("--mu", bo.mu, "Coupling mu")->capture_default_str();
  bo_cmd->add_option("--V", bo.potential, "Potential: gaussian:sigma=S,mass=M | delta:mass=M | zero | file:PATH")
      ->capture_default_str();
  bo.grid.add_to(bo_cmd);
  bo_cmd->add_option("--tol", bo.tol, "Stopping tolerance on ||u_{k+1} - u_k||_1")->capture_default_str();
  bo_cmd->add_option("--max-iter", bo.max_iter, "Iteration limit")->capture_default_str();
  bo_cmd->add_option("--out", bo.out, "Field output for u");
  bo_cmd->add_option("--report", bo.report, "JSON report path");

  VerifyArgs ve;
  auto* ve_cmd = app.add_subcommand(
      "verify", "Check a stored field against f >= sum a_n (*^n f) and the bounds int f <= t_Q, f >= 0");
  ve_cmd->add_option("--field", ve.field, "CVLF field file")->required();
  ve_cmd->add_option("--coeffs", ve.coeffs, "Comma list a_2,a_3,...,a_N")->capture_default_str();
  ve_cmd->add_option("--tol", ve.tol, "Relative tolerance")->capture_default_str();
  ve_cmd->add_option("--out", ve.out, "JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_invalid;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = exit_ok;
  try {
    if (*tq_cmd) {
      run.subcommand = "tq";
      code = run_tq(tq, run);
    } else if (*se_cmd) {
      run.subcommand = "series";
      code = run_series(se, run);
    } else if (*dk_cmd) {
      run.subcommand = "disk";
      code = run_disk(dk, run);
    } else if (*co_cmd) {
      run.subcommand = "construct";
      code = run_construct(co, run);
    } else if (*wi_cmd) {
      run.subcommand = "witness";
      code = run_witness(wi, run);
    } else if (*bo_cmd) {
      run.subcommand = "bose";
      code = run_bose(bo, run);
    } else if (*ve_cmd) {
      run.subcommand = "verify";
      code = run_verify(ve, run);
    }
  } catch (const Error& e) {
    std::cerr << "convlab: " << e.what() << '\n';
    code = exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "convlab: " << e.what() << '\n';
    code = exit_invalid;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const json manifest{{"tool", "convlab"},
                      {"version", CONVLAB_VERSION},
                      {"subcommand", run.subcommand},
                      {"config", run.config},
                      {"config_hash", fnv1a_hex(run.config.dump())},
                      {"threads", worker_count_from_env()},
                      {"outputs", run.outputs},
                      {"exit_code", code},
                      {"wall_seconds", wall}};
  try {
    write_json(run.manifest_path(), manifest);
  } catch (const std::exception& e) {
    std::cerr << "convlab: cannot write manifest: " << e.what() << '\n';
    if (code == exit_ok) code = exit_invalid;
  }
  return code;
}
