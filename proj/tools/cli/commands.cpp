#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dysonlab/estimates.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/quadrature.hpp"
#include "dysonlab/sampling.hpp"
#include "dysonlab/sde.hpp"
#include "svg.hpp"

namespace dysonlab::cli {

bool CommandOutput::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"kernel-table", "conditions", "simulate", "sample", "pv-check"};
  return names;
}

namespace {

constexpr std::uint64_t kDefaultSeed = 20240611;

// Keys every subcommand accepts besides its own.
const std::vector<std::string> kCommonKeys{"seed", "threads", "out", "format"};

void require_keys(const Config& c, std::vector<std::string> keys) {
  keys.insert(keys.end(), kCommonKeys.begin(), kCommonKeys.end());
  c.require_known(keys);
}

void require_theta(const Config& c, const std::string& key, double theta) {
  if (!(std::abs(theta) < std::numbers::sqrt2)) c.fail(key, "must satisfy |theta| < sqrt(2)");
}

std::vector<int> positive_ints(const Config& c, const std::string& key, const std::vector<long>& fallback,
                               long minimum) {
  std::vector<int> out;
  for (long v : c.get_int_list(key, fallback)) {
    if (v < minimum || v > 1000000) c.fail(key, "values must lie in [" + std::to_string(minimum) + ", 1000000]");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

template <typename T>
bool strictly_increasing(const std::vector<T>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

// Config echo: every effective parameter, defaults included. Thread count,
// output location and format are left out so they cannot change the bytes.
void echo_config(const Config& c, const std::string& seed, CommandOutput& out) {
  out.metadata.emplace_back("command", out.command);
  out.metadata.emplace_back("version", kVersion);
  out.metadata.emplace_back("seed", seed);
  for (const auto& [key, value] : c.resolved()) {
    if (key == "threads" || key == "out" || key == "format" || key == "seed") continue;
    out.metadata.emplace_back("config." + key, value);
  }
}

ExperimentReport checks_report(const std::vector<Check>& checks) {
  ExperimentReport r("checks", {"check", "value", "threshold", "result"});
  for (const auto& c : checks)
    r.add_row({Cell{c.name}, Cell{c.value}, Cell{c.threshold}, Cell{std::string(c.pass ? "PASS" : "FAIL")}});
  return r;
}

// ---------------------------------------------------------------------------
// kernel-table
// ---------------------------------------------------------------------------

CommandOutput kernel_table(const Config& c, const RunContext&) {
  require_keys(c, {"theta", "N", "grid_min", "grid_max", "grid_step"});
  const double theta = c.get_double("theta", 0.0);
  require_theta(c, "theta", theta);
  const auto Ns = positive_ints(c, "N", {256}, 1);
  const double lo = c.get_double("grid_min", -5.0), hi = c.get_double("grid_max", 5.0);
  const double step = c.get_double("grid_step", 0.25);
  if (!(hi > lo)) c.fail("grid_max", "must exceed grid_min");
  if (!(step > 0.0)) c.fail("grid_step", "must be positive");
  const long points = std::lround((hi - lo) / step) + 1;
  if (points > 2001) c.fail("grid_step", "grid too fine (more than 2001 points per axis)");
  if (std::abs(lo + (points - 1) * step - hi) > 1e-9 * std::max(1.0, std::abs(hi)))
    c.fail("grid_step", "must divide grid_max - grid_min");

  CommandOutput out;
  out.command = "kernel-table";
  echo_config(c, "none", out);
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (long i = 0; i < points; ++i) grid[i] = lo + step * i;

  ExperimentReport table("grid", {"N", "x", "y", "scaled_kernel", "sine_kernel", "difference"});
  ExperimentReport summary("summary", {"N", "sup_difference"});
  const SineKernel sine(theta);
  std::vector<double> sups, last_diff;
  for (int N : Ns) {
    const ScaledKernel k(N, theta);
    double sup = 0.0;
    last_diff.assign(grid.size() * grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double kv = k(grid[i], grid[j]), sv = sine(grid[i], grid[j]);
        const double d = kv - sv;
        sup = std::max(sup, std::abs(d));
        last_diff[i * grid.size() + j] = std::abs(d);
        table.add_row({Cell{std::int64_t{N}}, Cell{grid[i]}, Cell{grid[j]}, Cell{kv}, Cell{sv}, Cell{d}});
      }
    }
    sups.push_back(sup);
    summary.add_row({Cell{std::int64_t{N}}, Cell{sup}});
  }
  if (Ns.size() > 1) {
    bool decreasing = strictly_increasing(Ns);
    for (std::size_t i = 1; i < sups.size(); ++i) decreasing = decreasing && sups[i] < sups[i - 1];
    out.checks.push_back({"sup_difference strictly decreasing along N", sups.back(), sups.front(), decreasing});
  }
  out.reports.push_back(std::move(summary));
  out.reports.push_back(std::move(table));
  out.reports.push_back(checks_report(out.checks));

  SvgChart chart("|K_theta^N - sine kernel|, N = " + std::to_string(Ns.back()), "x", "y");
  chart.heatmap(grid, grid, last_diff, "#b2182b");
  out.svg = chart.render();
  return out;
}

// ---------------------------------------------------------------------------
// conditions
// ---------------------------------------------------------------------------

CommandOutput conditions(const Config& c, const RunContext& ctx) {
  require_keys(c, {"theta", "N", "r", "R", "x_points", "alpha", "pv_theta"});
  const double theta = c.get_double("theta", 0.5);
  require_theta(c, "theta", theta);
  const auto Ns = positive_ints(c, "N", {64, 256, 1024}, 2);
  const auto rs = c.get_double_list("r", {2.0, 8.0, 32.0});
  for (double r : rs)
    if (!(r > 0.0)) c.fail("r", "values must be positive");
  if (!strictly_increasing(rs)) c.fail("r", "values must be strictly increasing");
  const double R = c.get_double("R", 1.0);
  if (!(R >= 0.0)) c.fail("R", "must be >= 0");
  const long x_points = c.get_int("x_points", 41);
  if (x_points < 1 || x_points > 10001) c.fail("x_points", "must lie in [1, 10001]");
  const double alpha = c.get_double("alpha", BandDecomposition::default_alpha);
  if (!(alpha > -2.0 / 3.0 && alpha < -0.5)) c.fail("alpha", "must lie in (-2/3, -1/2)");
  const double pv_theta = c.get_double("pv_theta", theta);
  require_theta(c, "pv_theta", pv_theta);
  const double cutoff = std::numbers::sqrt2 + 1.0;
  for (int N : Ns)
    for (double r : rs)
      if (!(std::abs(theta) + (R + r) / N < cutoff))
        c.fail("r", "window x/N + theta +- r/N leaves the integration domain for N = " + std::to_string(N));

  CommandOutput out;
  out.command = "conditions";
  echo_config(c, "none", out);

  ConditionTableOptions opts;
  opts.x_points = static_cast<int>(x_points);
  opts.threads = ctx.threads;
  opts.tail.alpha = alpha;
  ExperimentReport table = condition_table(theta, Ns, rs, R, opts);

  const double pv = pv_semicircle(pv_theta);
  ExperimentReport pv_report("pv_check", {"theta", "value", "abs_error"});
  pv_report.add_row({Cell{pv_theta}, Cell{pv}, Cell{std::abs(pv - pv_theta)}});
  out.checks.push_back({"pv_semicircle(theta) = theta", std::abs(pv - pv_theta), 1e-6, std::abs(pv - pv_theta) <= 1e-6});

  // Nonnegative conditions shrink with the tail region, so they must be
  // non-increasing in r at every N.
  for (const std::string col : {"palm_drift", "variance"}) {
    bool monotone = true;
    double worst = 0.0;
    for (std::size_t iN = 0; iN < Ns.size(); ++iN) {
      for (std::size_t ir = 1; ir < rs.size(); ++ir) {
        const double prev = table.number(iN * rs.size() + ir - 1, col);
        const double cur = table.number(iN * rs.size() + ir, col);
        worst = std::max(worst, cur - prev);
        if (cur > prev) monotone = false;
      }
    }
    out.checks.push_back({col + " non-increasing in r", worst, 0.0, monotone});
  }

  SvgChart chart("Condition values at N = " + std::to_string(Ns.back()) + ", sup over |x| <= R", "r",
                 "magnitude");
  chart.log_y(true);
  const std::array<std::pair<const char*, const char*>, 4> cols{
      {{"drift", "#1b9e77"}, {"palm_drift", "#d95f02"}, {"variance", "#7570b3"}, {"palm_variance", "#e7298a"}}};
  for (const auto& [col, colour] : cols) {
    std::vector<double> ys;
    for (std::size_t ir = 0; ir < rs.size(); ++ir) ys.push_back(table.number((Ns.size() - 1) * rs.size() + ir, col));
    chart.line(rs, ys, colour, col);
  }
  out.svg = chart.render();

  out.reports.push_back(std::move(table));
  out.reports.push_back(std::move(pv_report));
  out.reports.push_back(checks_report(out.checks));
  return out;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

CommandOutput simulate(const Config& c, const RunContext& ctx) {
  require_keys(c, {"N", "theta", "T", "dt", "paths", "tagged", "time_points"});
  const long N = c.get_int("N", 128);
  if (N < 2 || N > 100000) c.fail("N", "must lie in [2, 100000]");
  const double theta = c.get_double("theta", 0.5);
  require_theta(c, "theta", theta);
  const double T = c.get_double("T", 1.0);
  if (!(T > 0.0)) c.fail("T", "must be positive");
  const double dt = c.get_double("dt", 1e-3);
  if (!(dt > 0.0) || dt > T) c.fail("dt", "must lie in (0, T]");
  if (T / dt > 1e8) c.fail("dt", "more than 1e8 steps");
  const long paths = c.get_int("paths", 500);
  if (paths < 2) c.fail("paths", "must be >= 2");
  const long tagged = c.get_int("tagged", 4);
  if (tagged < 1 || tagged > N) c.fail("tagged", "must lie in [1, N]");
  const long time_points = c.get_int("time_points", 10);
  if (time_points < 1) c.fail("time_points", "must be >= 1");
  const std::uint64_t seed = c.get_seed("seed", kDefaultSeed);

  CommandOutput out;
  out.command = "simulate";
  echo_config(c, std::to_string(seed), out);

  IntegrationOptions opts;
  opts.dt = dt;
  opts.T = T;
  const long steps = std::max(1L, std::lround(T / dt));
  opts.store_every = static_cast<int>(std::max(1L, steps / time_points));
  const int n = static_cast<int>(N), m = static_cast<int>(tagged);
  const auto initial = bulk_gue_initial(n, theta);
  const auto with_theta =
      run_ensemble(DriftSpec::finite_theta(theta, n), initial, static_cast<std::size_t>(paths), seed, opts, ctx.threads);
  const auto plain =
      run_ensemble(DriftSpec::finite_plain(n), initial, static_cast<std::size_t>(paths), seed, opts, ctx.threads);

  const std::vector<double> times = with_theta.paths.front().times;
  ExperimentReport stats_theta = tagged_statistics(with_theta, plain, m, times);
  stats_theta.name = "tagged_finite_theta";
  ExperimentReport stats_plain = tagged_statistics(plain, with_theta, m, times);
  stats_plain.name = "tagged_finite_plain";

  const MeanEstimate rate_theta = tagged_drift_rate(with_theta, m);
  const MeanEstimate rate_plain = tagged_drift_rate(plain, m);
  const MeanEstimate girsanov = girsanov_mean(plain, theta, n);

  ExperimentReport summary("summary", {"quantity", "estimate", "standard_error", "target"});
  summary.add_row({Cell{std::string("drift_rate_finite_theta")}, Cell{rate_theta.mean}, Cell{rate_theta.standard_error},
                   Cell{0.0}});
  summary.add_row({Cell{std::string("drift_rate_finite_plain")}, Cell{rate_plain.mean}, Cell{rate_plain.standard_error},
                   Cell{theta}});
  summary.add_row({Cell{std::string("girsanov_mean")}, Cell{girsanov.mean}, Cell{girsanov.standard_error}, Cell{1.0}});
  std::size_t halvings = 0;
  for (const auto* e : {&with_theta, &plain})
    for (const auto& p : e->paths) halvings += p.halvings;
  summary.add_row({Cell{std::string("halved_substeps")}, Cell{static_cast<double>(halvings)}, Cell{0.0}, Cell{0.0}});

  auto within = [](const MeanEstimate& e, double target) { return std::abs(e.mean - target) <= 3.0 * e.standard_error; };
  out.checks.push_back({"finite_theta drift rate within 3 SE of 0", std::abs(rate_theta.mean),
                        3.0 * rate_theta.standard_error, within(rate_theta, 0.0)});
  out.checks.push_back({"finite_plain drift rate within 3 SE of theta", std::abs(rate_plain.mean - theta),
                        3.0 * rate_plain.standard_error, within(rate_plain, theta)});
  out.checks.push_back({"Girsanov density mean within 3 SE of 1", std::abs(girsanov.mean - 1.0),
                        3.0 * girsanov.standard_error, within(girsanov, 1.0)});

  SvgChart chart("Tagged-particle mean increment (N = " + std::to_string(n) + ")", "t", "mean increment");
  for (const auto& [rep, colour] : {std::pair{&stats_theta, "#1b9e77"}, std::pair{&stats_plain, "#d95f02"}}) {
    std::vector<double> t, mean, lo, hi;
    for (std::size_t k = 0; k < rep->rows.size(); ++k) {
      t.push_back(rep->number(k, "time"));
      const double mu = rep->number(k, "increment_mean"), se = rep->number(k, "increment_se");
      mean.push_back(mu);
      lo.push_back(mu - 2.0 * se);
      hi.push_back(mu + 2.0 * se);
    }
    chart.band(t, lo, hi, colour);
    chart.line(t, mean, colour, rep->name);
  }
  out.svg = chart.render();

  out.reports.push_back(std::move(summary));
  out.reports.push_back(std::move(stats_theta));
  out.reports.push_back(std::move(stats_plain));
  out.reports.push_back(checks_report(out.checks));
  return out;
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

CommandOutput sample(const Config& c, const RunContext& ctx) {
  require_keys(c, {"N", "draws", "theta", "density_N", "density_draws", "window_min", "window_max", "bins",
                   "ks_threshold"});
  const long N = c.get_int("N", 200);
  if (N < 1 || N > 100000) c.fail("N", "must lie in [1, 100000]");
  const long draws = c.get_int("draws", 200);
  if (draws < 1) c.fail("draws", "must be >= 1");
  const double theta = c.get_double("theta", 0.5);
  require_theta(c, "theta", theta);
  const long density_N = c.get_int("density_N", 256);
  if (density_N < 2 || density_N > 100000) c.fail("density_N", "must lie in [2, 100000]");
  const long density_draws = c.get_int("density_draws", 500);
  if (density_draws < 2) c.fail("density_draws", "must be >= 2");
  const double wlo = c.get_double("window_min", -5.0), whi = c.get_double("window_max", 5.0);
  if (!(whi > wlo)) c.fail("window_max", "must exceed window_min");
  const long bins = c.get_int("bins", 20);
  if (bins < 1 || bins > 100000) c.fail("bins", "must lie in [1, 100000]");
  const double ks_threshold = c.get_double("ks_threshold", 0.03);
  if (!(ks_threshold > 0.0)) c.fail("ks_threshold", "must be positive");
  const std::uint64_t seed = c.get_seed("seed", kDefaultSeed);

  CommandOutput out;
  out.command = "sample";
  echo_config(c, std::to_string(seed), out);

  // Semicircle law.
  const auto draws_raw = sample_gue_batch(static_cast<int>(N), static_cast<std::size_t>(draws), seed, ctx.threads);
  ExperimentReport eig("eigenvalues", {"draw", "index", "position"});
  std::vector<double> scaled;
  for (std::size_t d = 0; d < draws_raw.size(); ++d) {
    const auto s = semicircle_scale(draws_raw[d]);
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      eig.add_row({Cell{static_cast<std::int64_t>(d)}, Cell{static_cast<std::int64_t>(i)}, Cell{draws_raw[d][i]}});
      scaled.push_back(s[i]);
    }
  }
  const double ks = ks_distance_semicircle(scaled);
  ExperimentReport ks_report("ks", {"N", "draws", "ks_distance", "threshold"});
  ks_report.add_row({Cell{std::int64_t{N}}, Cell{std::int64_t{draws}}, Cell{ks}, Cell{ks_threshold}});
  out.checks.push_back({"KS distance to semicircle", ks, ks_threshold, ks <= ks_threshold});

  // Empirical one-point function against the kernel diagonal, bin-averaged.
  const auto dens_raw =
      sample_gue_batch(static_cast<int>(density_N), static_cast<std::size_t>(density_draws), seed + 1, ctx.threads);
  std::vector<ParticleConfiguration> bulk;
  bulk.reserve(dens_raw.size());
  for (const auto& s : dens_raw) bulk.push_back(bulk_scale(s, theta));
  const auto dens = empirical_one_point(bulk, Interval{wlo, whi}, static_cast<int>(bins));
  const ScaledKernel k(static_cast<int>(density_N), theta);
  ExperimentReport dens_report("density", {"y", "empirical", "standard_error", "kernel_diagonal", "z_score"});
  double sup = 0.0, pooled = 0.0;
  std::vector<double> ys, emp, ker;
  for (Eigen::Index b = 0; b < dens.grid.size(); ++b) {
    const std::array<double, 2> edges{dens.grid(b) - 0.5 * dens.bin_width, dens.grid(b) + 0.5 * dens.bin_width};
    QuadratureOptions qopts;
    qopts.rel_tol = 1e-10;
    const double avg = integrate_adaptive_scalar([&](double y) { return k.diag(y); }, edges, qopts).value /
                       dens.bin_width;
    const double se = dens.standard_error(b);
    const double diff = dens.values(b) - avg;
    sup = std::max(sup, std::abs(diff));
    pooled += se * se;
    dens_report.add_row({Cell{dens.grid(b)}, Cell{dens.values(b)}, Cell{se}, Cell{avg}, Cell{se > 0 ? diff / se : 0.0}});
    ys.push_back(dens.grid(b));
    emp.push_back(dens.values(b));
    ker.push_back(avg);
  }
  pooled = std::sqrt(pooled / static_cast<double>(dens.grid.size()));
  out.checks.push_back({"empirical one-point within 3 pooled SE of kernel diagonal", sup, 3.0 * pooled,
                        sup <= 3.0 * pooled});

  SvgChart chart("One-point function, N = " + std::to_string(density_N) + ", bulk scaling", "y", "density");
  chart.line(ys, emp, "#d95f02", "empirical");
  chart.line(ys, ker, "#1b9e77", "kernel diagonal");
  out.svg = chart.render();

  out.reports.push_back(std::move(ks_report));
  out.reports.push_back(std::move(dens_report));
  out.reports.push_back(std::move(eig));
  out.reports.push_back(checks_report(out.checks));
  return out;
}

// ---------------------------------------------------------------------------
// pv-check
// ---------------------------------------------------------------------------

CommandOutput pv_check(const Config& c, const RunContext&) {
  require_keys(c, {"theta", "tolerance"});
  const auto thetas = c.get_double_list("theta", {-1.2, -0.7, 0.0, 0.3, 0.7, 1.2});
  for (double t : thetas) require_theta(c, "theta", t);
  const double tol = c.get_double("tolerance", 1e-6);
  if (!(tol > 0.0)) c.fail("tolerance", "must be positive");

  CommandOutput out;
  out.command = "pv-check";
  echo_config(c, "none", out);
  ExperimentReport rep("pv_semicircle", {"theta", "value", "abs_error"});
  double worst = 0.0;
  std::vector<double> values;
  for (double t : thetas) {
    const double v = pv_semicircle(t);
    worst = std::max(worst, std::abs(v - t));
    values.push_back(v);
    rep.add_row({Cell{t}, Cell{v}, Cell{std::abs(v - t)}});
  }
  out.checks.push_back({"max |pv_semicircle(theta) - theta|", worst, tol, worst <= tol});

  SvgChart chart("Principal-value semicircle integral", "theta", "value");
  std::vector<double> sorted = thetas;
  std::sort(sorted.begin(), sorted.end());
  chart.line(sorted, sorted, "#999999", "theta");
  std::vector<double> sorted_values;
  for (double t : sorted) sorted_values.push_back(values[std::find(thetas.begin(), thetas.end(), t) - thetas.begin()]);
  chart.line(sorted, sorted_values, "#d95f02", "P.V. integral");
  out.svg = chart.render();

  out.reports.push_back(std::move(rep));
  out.reports.push_back(checks_report(out.checks));
  return out;
}

}  // namespace

CommandOutput run_command(const std::string& command, const Config& config, const RunContext& context) {
  if (command == "kernel-table") return kernel_table(config, context);
  if (command == "conditions") return conditions(config, context);
  if (command == "simulate") return simulate(config, context);
  if (command == "sample") return sample(config, context);
  if (command == "pv-check") return pv_check(config, context);
  throw ConfigError("", 0, "", "unknown subcommand '" + command + "'");
}

namespace {

nlohmann::ordered_json metadata_json(const CommandOutput& output) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : output.metadata) meta[k] = v;
  return meta;
}

nlohmann::ordered_json checks_json(const CommandOutput& output) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : output.checks)
    arr.push_back({{"check", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  return arr;
}

void write_file(const std::filesystem::path& path, const std::string& content, std::vector<std::string>& written) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << content;
  if (!f) throw Error("write failed for " + path.string());
  written.push_back(path.string());
}

}  // namespace

std::vector<std::string> write_outputs(const CommandOutput& output, const std::string& out_dir,
                                       const std::string& format) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;
  const std::string stem = output.command;

  if (format == "json") {
    nlohmann::ordered_json j;
    j["metadata"] = metadata_json(output);
    j["checks"] = checks_json(output);
    nlohmann::ordered_json reps = nlohmann::ordered_json::array();
    for (const auto& r : output.reports) reps.push_back(to_json(r));
    j["reports"] = std::move(reps);
    write_file(dir / (stem + ".json"), j.dump(2) + "\n", written);
    return written;
  }

  // csv (and svg, which adds the chart next to the tables)
  nlohmann::ordered_json meta;
  meta["metadata"] = metadata_json(output);
  meta["checks"] = checks_json(output);
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& r : output.reports) {
    const std::string name = stem + "_" + r.name + ".csv";
    std::ostringstream csv;
    write_csv(r, csv);
    write_file(dir / name, csv.str(), written);
    nlohmann::ordered_json rm = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metadata) rm[k] = v;
    files.push_back({{"file", name}, {"report", r.name}, {"metadata", rm}});
  }
  meta["tables"] = std::move(files);
  write_file(dir / (stem + "_meta.json"), meta.dump(2) + "\n", written);
  if (format == "svg" && output.svg) write_file(dir / (stem + ".svg"), *output.svg, written);
  return written;
}

}  // namespace dysonlab::cli
