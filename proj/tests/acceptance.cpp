// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion. Exit status is 0 only if all pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "dysonlab/estimates.hpp"
#include "dysonlab/hermite.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/parallel.hpp"
#include "dysonlab/quadrature.hpp"
#include "dysonlab/sampling.hpp"
#include "dysonlab/sde.hpp"
#include "oracles.hpp"

using namespace dysonlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

unsigned threads() { return resolve_threads(0); }

// 1. Christoffel-Darboux identity on random triples.
Outcome christoffel_darboux() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> n(1, 60);
  std::uniform_real_distribution<double> u(-12.0, 12.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int N = n(rng);
    double x = u(rng), y = u(rng);
    while (y == x) y = u(rng);
    const double s = kernel_sum(N, x, y);
    worst = std::max(worst, std::abs(s - kernel_cd(N, x, y)) / std::max(1.0, std::abs(s)));
  }
  return {worst <= 1e-10, "max relative difference " + fmt("%.2e", worst)};
}

// 2. Orthonormality, reproducing property and trace.
Outcome orthonormality_and_projection() {
  QuadratureOptions q;
  q.rel_tol = 1e-12;
  q.abs_tol = 1e-15;
  const std::array<double, 2> line{-14.0, 14.0};

  const int n = 30;
  const OscillatorEvaluator ev(n);
  const Eigen::Index pairs = (n + 1) * (n + 2) / 2;
  auto products = [&](double t, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::VectorXd p = ev.batch(t);
    Eigen::Index k = 0;
    for (int i = 0; i <= n; ++i)
      for (int j = i; j <= n; ++j) out(k++) = p(i) * p(j);
  };
  const auto gram = integrate_adaptive(products, std::span<const double>(line), pairs, pairs, q);
  double ortho = 0.0;
  Eigen::Index k = 0;
  for (int i = 0; i <= n; ++i)
    for (int j = i; j <= n; ++j) ortho = std::max(ortho, std::abs(gram.value(k++) - (i == j ? 1.0 : 0.0)));

  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> nn(1, 30);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  double proj = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int N = nn(rng);
    const double x = u(rng), y = u(rng);
    const FiniteKernel K(N);
    const double v = integrate_adaptive_scalar([&](double s) { return K(x, s) * K(s, y); }, line, q).value;
    proj = std::max(proj, std::abs(v - K(x, y)));
  }

  double trace = 0.0;
  for (int N = 1; N <= 30; ++N) {
    const FiniteKernel K(N);
    trace = std::max(trace, std::abs(integrate_adaptive_scalar([&](double s) { return K.diag(s); }, line, q).value - N));
  }
  const bool pass = ortho <= 1e-8 && proj <= 1e-6 && trace <= 1e-6;
  return {pass, "orthonormality " + fmt("%.1e", ortho) + ", projection " + fmt("%.1e", proj) + ", trace " +
                    fmt("%.1e", trace)};
}

// 3. Principal-value identity.
Outcome principal_value() {
  double worst = 0.0;
  for (double t : {-1.2, -0.7, 0.0, 0.3, 0.7, 1.2}) worst = std::max(worst, std::abs(pv_semicircle(t) - t));
  return {worst <= 1e-6, "max |pv - theta| " + fmt("%.1e", worst)};
}

// 4. Sine-kernel convergence on [-5, 5]^2.
Outcome sine_kernel_convergence() {
  bool pass = true;
  std::string detail;
  for (double theta : {0.0, 0.5, 1.0}) {
    const SineKernel sine(theta);
    std::vector<double> sups;
    for (int N : {64, 256, 1024}) {
      const ScaledKernel k(N, theta);
      double sup = 0.0;
      for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
          const double x = -5.0 + 0.25 * i, y = -5.0 + 0.25 * j;
          sup = std::max(sup, std::abs(k(x, y) - sine(x, y)));
        }
      sups.push_back(sup);
    }
    pass = pass && sups[1] < sups[0] && sups[2] < sups[1] && sups[2] <= 0.05;
    detail += (detail.empty() ? "" : "; ") + std::string("theta ") + fmt("%.1f", theta) + ": " + fmt("%.2e", sups[0]) +
              " > " + fmt("%.2e", sups[1]) + " > " + fmt("%.2e", sups[2]);
  }
  return {pass, detail};
}

// 5. Condition tables.
Outcome condition_tables() {
  const std::vector<int> Ns{64, 256, 1024};
  const std::vector<double> rs{2.0, 8.0, 32.0};
  ConditionTableOptions opts;
  opts.threads = threads();
  const auto table = condition_table(0.5, Ns, rs, 1.0, opts);
  const std::array<std::pair<const char*, double>, 4> conditions{
      {{"drift", 0.1}, {"palm_drift", 0.1}, {"variance", 0.2}, {"palm_variance", 0.2}}};
  bool pass = true;
  std::string detail;
  const std::size_t corner = table.rows.size() - 1;
  for (const auto& [col, threshold] : conditions) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
      if (table.number(i, col) < table.number(best, col)) best = i;
    const double value = table.number(corner, col);
    const bool ok = best == corner && value <= threshold;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + std::string(col) + " corner " + fmt("%.3e", value);
    if (best != corner)
      detail += " (min " + fmt("%.3e", table.number(best, col)) + " at N=" + fmt("%.0f", table.number(best, "N")) +
                ", r=" + fmt("%.0f", table.number(best, "r")) + ")";
    detail += ok ? " ok" : " FAIL";
  }
  return {pass, detail};
}

// 6. Kernel-bound sweeps. The sup over U^N includes the boundary points of
// the band, which belong to U^N.
Outcome kernel_bounds() {
  const std::vector<int> Ns{64, 256, 1024};
  std::array<std::vector<double>, 3> stats;
  for (int N : Ns) {
    const OscillatorEvaluator ev(N + 1);
    const BandDecomposition band(N);
    const double lim = std::numbers::sqrt2 + 1.0;
    std::vector<double> grid;
    for (int i = 0; i <= 966; ++i) grid.push_back(-lim + i * 2.0 * lim / 966);
    for (double e : band.edges()) grid.push_back(e);
    const double root_n = std::sqrt(static_cast<double>(N));
    std::vector<double> p(grid.size()), q(grid.size()), d(grid.size());
    std::vector<char> in_u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::array<double, 4> top{};
      ev.top_values(N + 1, root_n * grid[i], top);
      q[i] = top[1];
      p[i] = top[2];
      d[i] = kernel_diag_from_top_values(N, top) / root_n;
      in_u[i] = !band.in_band(grid[i]);
    }
    double all = 0.0, on_u = 0.0, decay = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double gap = grid[i] - grid[j];
        const double l = gap == 0.0 ? d[i] : (p[i] * q[j] - q[i] * p[j]) / (std::sqrt(2.0 * N) * gap);
        all = std::max(all, std::abs(l));
        if (in_u[i] && in_u[j]) {
          on_u = std::max(on_u, std::abs(l));
          decay = std::max(decay, N * std::abs(gap) * std::abs(l));
        }
      }
    stats[0].push_back(all / std::cbrt(static_cast<double>(N)));
    stats[1].push_back(on_u);
    stats[2].push_back(decay);
  }
  const std::array<const char*, 3> names{"sup|L|/N^(1/3)", "sup_U |L|", "sup_U N|x-y||L|"};
  bool pass = true;
  std::string detail;
  for (int s = 0; s < 3; ++s) {
    double growth = 0.0;
    for (std::size_t i = 1; i < Ns.size(); ++i) growth = std::max(growth, stats[s][i] / stats[s][i - 1]);
    const bool ok = growth <= 1.2;
    pass = pass && ok;
    detail += (s ? "; " : "") + std::string(names[s]) + " " + fmt("%.3f", stats[s][0]) + ", " +
              fmt("%.3f", stats[s][1]) + ", " + fmt("%.3f", stats[s][2]) + " (max step ratio " + fmt("%.2f", growth) +
              (ok ? ")" : ", FAIL)");
  }
  return {pass, detail};
}

// 7. Semicircle law.
Outcome semicircle_law() {
  auto ks_at = [](int N) {
    std::vector<double> v;
    for (const auto& d : sample_gue_batch(N, 200, 303, threads())) {
      const auto s = semicircle_scale(d);
      for (Eigen::Index i = 0; i < s.size(); ++i) v.push_back(s[i]);
    }
    return ks_distance_semicircle(v);
  };
  const double k50 = ks_at(50), k100 = ks_at(100), k200 = ks_at(200);
  const bool pass = k200 <= 0.03 && k100 < k50 && k200 < k100;
  return {pass, "KS N=50 " + fmt("%.2e", k50) + ", N=100 " + fmt("%.2e", k100) + ", N=200 " + fmt("%.2e", k200)};
}

// 8. Sampler calibration.
Outcome sampler_calibration() {
  std::vector<double> sq;
  for (const auto& d : sample_gue_batch(1, 100000, 404, threads())) sq.push_back(d[0] * d[0]);
  const double var = oracle::mean_and_se(sq).first;
  std::vector<double> spacing;
  for (const auto& d : sample_gue_batch(2, 100000, 405, threads())) spacing.push_back((d[1] - d[0]) * (d[1] - d[0]));
  const auto [m1, se1] = oracle::mean_and_se(spacing);
  const auto [m2, se2] = oracle::mean_and_se(oracle::rejection_spacing_squares(100000, 406));
  const double z = std::abs(m1 - m2) / std::hypot(se1, se2);
  const bool pass = std::abs(var - 0.5) <= 0.01 && z <= 3.0;
  return {pass, "N=1 variance " + fmt("%.4f", var) + "; N=2 E[spacing^2] " + fmt("%.4f", m1) + " vs oracle " +
                    fmt("%.4f", m2) + " (" + fmt("%.2f", z) + " SE)"};
}

// 9. Girsanov density.
Outcome girsanov() {
  IntegrationOptions o;
  o.dt = 1e-2;
  o.T = 1.0;
  o.store_every = 100;
  bool pass = true;
  std::string detail;
  for (double theta : {0.5, 1.0}) {
    std::vector<double> vars;
    for (int N : {8, 32}) {
      const auto e = run_ensemble(DriftSpec::finite_plain(N), bulk_gue_initial(N, theta), 10000,
                                  static_cast<std::uint64_t>(500 + N), o, threads());
      const auto m = girsanov_mean(e, theta, N);
      const bool ok = std::abs(m.mean - 1.0) <= 3.0 * m.standard_error;
      pass = pass && ok;
      vars.push_back(m.variance);
      detail += (detail.empty() ? "" : "; ") + std::string("theta ") + fmt("%.1f", theta) + " N " +
                std::to_string(N) + ": mean " + fmt("%.4f", m.mean) + " +- " + fmt("%.4f", m.standard_error) +
                ", var " + fmt("%.4f", m.variance);
    }
    pass = pass && vars[1] < vars[0];
  }
  return {pass, detail};
}

// 10. Tagged-particle drift rates, via the simulate subcommand.
Outcome sde_desk_check() {
  auto config = cli::Config::parse_text("N = 128\ntheta = 0.5\nT = 1\ndt = 1e-3\npaths = 500\n", "acceptance");
  cli::RunContext ctx;
  ctx.threads = threads();
  const auto out = cli::run_command("simulate", config, ctx);
  const auto& summary = out.reports.front();
  const bool pass = out.checks[0].pass && out.checks[1].pass;
  return {pass, "finite_theta rate " + fmt("%.4f", summary.number(0, "estimate")) + " +- " +
                    fmt("%.4f", summary.number(0, "standard_error")) + ", finite_plain rate " +
                    fmt("%.4f", summary.number(1, "estimate")) + " +- " +
                    fmt("%.4f", summary.number(1, "standard_error"))};
}

// 11. Byte-identical CLI output across runs and thread counts.
std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream f(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    out[entry.path().filename().string()] = s.str();
  }
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "dysonlab_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"kernel-table", "-p N=64,128 -p grid_step=0.5"},
      {"conditions", "-p N=32,64 -p r=2,4 -p x_points=3"},
      {"simulate", "-p N=16 -p paths=40 -p dt=0.01 -p T=0.5"},
      {"sample", "-p N=50 -p draws=20 -p density_N=32 -p density_draws=50"},
      {"pv-check", ""},
  };
  bool pass = true;
  std::string detail;
  for (const auto& [cmd, args] : runs) {
    for (const char* format : {"svg", "json"}) {
      std::vector<std::map<std::string, std::string>> trees;
      bool ran = true;
      int index = 0;
      for (const char* t : {"1", "1", "8"}) {
        const fs::path out = root / (cmd + "_" + format + "_" + std::to_string(index++));
        const std::string line = std::string(DYSONLAB_CLI_PATH) + " " + cmd + " " + args + " --seed 11 --threads " + t +
                                 " --format " + format + " --out " + out.string() + " > /dev/null 2>&1";
        const int status = std::system(line.c_str());
        ran = ran && WIFEXITED(status) && WEXITSTATUS(status) <= 1 && fs::exists(out);
        if (ran) trees.push_back(read_tree(out));
      }
      const bool same = ran && trees.size() == 3 && !trees[0].empty() && trees[0] == trees[1] && trees[0] == trees[2];
      pass = pass && same;
      if (!same) detail += (detail.empty() ? "" : "; ") + cmd + " (" + format + ") differs";
    }
  }
  fs::remove_all(root);
  if (pass) detail = "5 subcommands x {svg, json}: identical across 2 runs and threads {1, 8}";
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Christoffel-Darboux identity", 1.0, christoffel_darboux},
      {2, "orthonormality and projection", 10.0, orthonormality_and_projection},
      {3, "principal-value semicircle identity", 1.0, principal_value},
      {4, "sine-kernel convergence", 120.0, sine_kernel_convergence},
      {5, "condition tables", 600.0, condition_tables},
      {6, "kernel-bound sweeps", 120.0, kernel_bounds},
      {7, "semicircle law", 60.0, semicircle_law},
      {8, "sampler calibration", 60.0, sampler_calibration},
      {9, "Girsanov density", 120.0, girsanov},
      {10, "SDE tagged-particle desk check", 600.0, sde_desk_check},
      {11, "CLI determinism", 600.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %2d %s: %s [%.1f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
