#include "dysonlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dysonlab/errors.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/parallel.hpp"

namespace dysonlab {

DriftSpec DriftSpec::finite_theta(double theta, int N) {
  DriftSpec s;
  s.kind = Kind::finite_theta;
  s.theta = theta;
  s.N = N;
  s.validate();
  return s;
}

DriftSpec DriftSpec::finite_plain(int N) {
  DriftSpec s;
  s.kind = Kind::finite_plain;
  s.N = N;
  s.validate();
  return s;
}

DriftSpec DriftSpec::truncated(double r) {
  DriftSpec s;
  s.kind = Kind::truncated;
  s.range = r;
  s.validate();
  return s;
}

DriftSpec DriftSpec::truncated_theta(double r, double theta) {
  DriftSpec s;
  s.kind = Kind::truncated_theta;
  s.range = r;
  s.theta = theta;
  s.validate();
  return s;
}

DriftSpec DriftSpec::with_reservoir(double low, double high, double bulk_theta) const {
  check_bulk_position(bulk_theta);
  if (!(high >= low)) throw DomainError("DriftSpec: reservoir window must satisfy low <= high");
  DriftSpec s = *this;
  s.reservoir_spacing = std::numbers::pi / std::sqrt(2.0 - bulk_theta * bulk_theta);
  s.reservoir_low = low;
  s.reservoir_high = high;
  s.validate();
  return s;
}

void DriftSpec::validate() const {
  switch (kind) {
    case Kind::finite_theta:
      check_bulk_position(theta);
      [[fallthrough]];
    case Kind::finite_plain:
      if (N < 1) throw DomainError("DriftSpec: N must be >= 1");
      if (reservoir_spacing != 0.0) throw DomainError("DriftSpec: reservoirs apply to truncated drifts only");
      break;
    case Kind::truncated_theta:
      check_bulk_position(theta);
      [[fallthrough]];
    case Kind::truncated:
      if (!(range > 0.0)) throw DomainError("DriftSpec: truncation range r must be > 0");
      if (reservoir_spacing < 0.0) throw DomainError("DriftSpec: negative reservoir spacing");
      break;
  }
}

void DriftSpec::validate_size(Eigen::Index particles) const {
  if ((kind == Kind::finite_theta || kind == Kind::finite_plain) && particles != N)
    throw DomainError("DriftSpec: state has " + std::to_string(particles) + " particles, spec expects " +
                      std::to_string(N));
  if (particles < 1) throw DomainError("DriftSpec: empty state");
}

namespace {

bool is_finite_kind(const DriftSpec& s) {
  return s.kind == DriftSpec::Kind::finite_theta || s.kind == DriftSpec::Kind::finite_plain;
}

// Interaction with the frozen reservoir lattice, within range.
double reservoir_push(const DriftSpec& s, double xi) {
  if (s.reservoir_spacing <= 0.0) return 0.0;
  double sum = 0.0;
  for (int k = 1;; ++k) {
    const double d = xi - (s.reservoir_low - k * s.reservoir_spacing);
    if (!(d < s.range)) break;
    if (d > 0.0) sum += 1.0 / d;
  }
  for (int k = 1;; ++k) {
    const double d = xi - (s.reservoir_high + k * s.reservoir_spacing);
    if (!(-d < s.range)) break;
    if (d < 0.0) sum += 1.0 / d;
  }
  return sum;
}

double external(const DriftSpec& s, double xi) {
  switch (s.kind) {
    case DriftSpec::Kind::finite_theta:
      return -xi / s.N - s.theta;
    case DriftSpec::Kind::finite_plain:
      return -xi / s.N;
    case DriftSpec::Kind::truncated:
      return reservoir_push(s, xi);
    case DriftSpec::Kind::truncated_theta:
      return reservoir_push(s, xi) + s.theta;
  }
  return 0.0;
}

[[noreturn]] void collision(Eigen::Index i, Eigen::Index j) {
  throw CollisionError("drift: particles " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

}  // namespace

double drift(const DriftSpec& spec, Eigen::Index i, const Eigen::VectorXd& state) {
  spec.validate_size(state.size());
  if (i < 0 || i >= state.size()) throw DomainError("drift: particle index out of range");
  const double xi = state(i);
  const bool finite = is_finite_kind(spec);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < state.size(); ++j) {
    if (j == i) continue;
    const double d = xi - state(j);
    if (d == 0.0) collision(i, j);
    if (finite || std::abs(d) < spec.range) sum += 1.0 / d;
  }
  return sum + external(spec, xi);
}

void drift_all(const DriftSpec& spec, const Eigen::VectorXd& state, Eigen::Ref<Eigen::VectorXd> out) {
  spec.validate_size(state.size());
  const Eigen::Index n = state.size();
  const bool finite = is_finite_kind(spec);
  out.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = state(i);
    double acc = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = xi - state(j);
      if (d == 0.0) collision(i, j);
      if (!finite && !(std::abs(d) < spec.range)) continue;
      const double inv = 1.0 / d;
      acc += inv;
      out(j) -= inv;
    }
    out(i) += acc + external(spec, xi);
  }
}

Eigen::VectorXd euler_step(const DriftSpec& spec, const Eigen::VectorXd& state, const Eigen::VectorXd& dW, double h,
                           double taming_cap) {
  Eigen::VectorXd b(state.size());
  drift_all(spec, state, b);
  Eigen::VectorXd next(state.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const double tamed = std::isinf(taming_cap) ? b(i) * h : b(i) * h / (1.0 + std::abs(b(i)) * h / taming_cap);
    next(i) = state(i) + tamed + dW(i);
  }
  return next;
}

namespace {

bool strictly_ordered(const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i))) return false;
    if (i > 0 && !(x(i) > x(i - 1))) return false;
  }
  return true;
}

class Stepper {
 public:
  Stepper(const DriftSpec& spec, const IntegrationOptions& opts, double gamma, std::mt19937_64& rng)
      : spec_(spec), opts_(opts), gamma_(gamma), rng_(rng) {}

  // Advances x over [t, t + h] with Brownian increment dW; on an ordering
  // violation the step is split with a Brownian bridge midpoint.
  void advance(Eigen::VectorXd& x, double t, double h, const Eigen::VectorXd& dW, int level) {
    Eigen::VectorXd next = euler_step(spec_, x, dW, h, gamma_);
    if (strictly_ordered(next)) {
      x = std::move(next);
      return;
    }
    if (level >= opts_.max_halvings)
      throw StepFailure("integrate: particle order still violated after " + std::to_string(level) + " halvings",
                        t, x);
    Eigen::VectorXd half(x.size());
    if (opts_.zero_noise) {
      half.setZero();
    } else {
      const double s = std::sqrt(0.25 * h);
      for (Eigen::Index i = 0; i < half.size(); ++i) half(i) = 0.5 * dW(i) + s * normal_(rng_);
    }
    halvings_ += 2;
    advance(x, t, 0.5 * h, half, level + 1);
    const Eigen::VectorXd rest = dW - half;
    advance(x, t + 0.5 * h, 0.5 * h, rest, level + 1);
  }

  std::size_t halvings() const { return halvings_; }
  double gaussian() { return normal_(rng_); }

 private:
  const DriftSpec& spec_;
  const IntegrationOptions& opts_;
  double gamma_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::size_t halvings_ = 0;
};

}  // namespace

Path integrate(const DriftSpec& spec, const Eigen::VectorXd& initial, std::mt19937_64& rng,
               const IntegrationOptions& opts) {
  spec.validate();
  spec.validate_size(initial.size());
  if (!(opts.dt > 0.0) || !(opts.T > 0.0)) throw DomainError("integrate: dt and T must be positive");
  if (opts.store_every < 1) throw DomainError("integrate: store_every must be >= 1");
  if (!strictly_ordered(initial)) throw DomainError("integrate: initial state must be strictly increasing");

  const auto steps = static_cast<long>(std::llround(opts.T / opts.dt));
  if (steps < 1) throw DomainError("integrate: T / dt must be at least 1");
  const double h = opts.T / static_cast<double>(steps);
  const double gamma = opts.taming_cap > 0.0 ? opts.taming_cap : 2.0 / std::sqrt(h);

  const Eigen::Index n = initial.size();
  const long stored = (steps + opts.store_every - 1) / opts.store_every + 1;
  Path path;
  path.states.resize(n, stored);
  path.times.reserve(static_cast<std::size_t>(stored));
  path.brownian_terminal = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd x = initial;
  path.states.col(0) = x;
  path.times.push_back(0.0);
  Stepper stepper(spec, opts, gamma, rng);
  Eigen::VectorXd dW(n);
  const double sqrt_h = std::sqrt(h);
  Eigen::Index col = 1;
  for (long s = 1; s <= steps; ++s) {
    if (opts.zero_noise) {
      dW.setZero();
    } else {
      for (Eigen::Index i = 0; i < n; ++i) dW(i) = sqrt_h * stepper.gaussian();
    }
    path.brownian_terminal += dW;
    stepper.advance(x, (s - 1) * h, h, dW, 0);
    if (s % opts.store_every == 0 || s == steps) {
      path.states.col(col++) = x;
      path.times.push_back(s * h);
    }
  }
  path.halvings = stepper.halvings();
  return path;
}

Path integrate(const DriftSpec& spec, const ParticleConfiguration& initial, std::uint64_t seed,
               const IntegrationOptions& opts) {
  auto rng = make_stream(seed, 0);
  return integrate(spec, initial.positions(), rng, opts);
}

Eigen::MatrixXd PathEnsemble::brownian_terminals() const {
  if (paths.empty()) return {};
  Eigen::MatrixXd out(paths.front().brownian_terminal.size(), static_cast<Eigen::Index>(paths.size()));
  for (std::size_t p = 0; p < paths.size(); ++p) out.col(static_cast<Eigen::Index>(p)) = paths[p].brownian_terminal;
  return out;
}

InitialSampler bulk_gue_initial(int N, double theta) {
  check_bulk_position(theta);
  if (N < 1) throw DomainError("bulk_gue_initial: N must be >= 1");
  return [N, theta](std::mt19937_64& rng) {
    return bulk_scale(sample_gue_eigenvalues(N, rng), theta).positions();
  };
}

PathEnsemble run_ensemble(const DriftSpec& spec, const InitialSampler& initial, std::size_t paths,
                          std::uint64_t seed, const IntegrationOptions& opts, unsigned threads) {
  spec.validate();
  PathEnsemble e;
  e.paths.resize(paths);
  e.initial.resize(paths);
  e.seed = seed;
  e.dt = opts.dt;
  e.T = opts.T;
  parallel_for(paths, threads, [&](std::size_t p) {
    auto rng = make_stream(seed, p);
    e.initial[p] = initial(rng);
    e.paths[p] = integrate(spec, e.initial[p], rng, opts);
  });
  return e;
}

Path shift_transform(const Path& path, double theta) {
  Path out = path;
  for (std::size_t k = 0; k < path.times.size(); ++k)
    out.states.col(static_cast<Eigen::Index>(k)).array() += theta * path.times[k];
  return out;
}

double girsanov_log_density(double theta, int N, const Eigen::VectorXd& brownian_terminal, double T) {
  if (N < 1) throw DomainError("girsanov_log_density: N must be >= 1");
  return theta / N * brownian_terminal.sum() - theta * theta * T / (2.0 * N);
}

MeanEstimate estimate_mean(const std::vector<double>& values) {
  MeanEstimate m;
  m.samples = values.size();
  if (values.empty()) return m;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.variance = ss / (n - 1.0);
    m.standard_error = std::sqrt(m.variance / n);
  }
  return m;
}

MeanEstimate girsanov_mean(const PathEnsemble& ensemble, double theta, int N) {
  std::vector<double> w;
  w.reserve(ensemble.paths.size());
  for (const auto& p : ensemble.paths) {
    if (p.brownian_terminal.size() != N) throw DomainError("girsanov_mean: N does not match the ensemble");
    w.push_back(std::exp(girsanov_log_density(theta, N, p.brownian_terminal, ensemble.T)));
  }
  return estimate_mean(w);
}

namespace {

std::vector<Eigen::Index> tagged_indices(const Eigen::VectorXd& initial, int m) {
  if (m < 1 || m > initial.size())
    throw DomainError("tagged statistics: m = " + std::to_string(m) + " must lie in [1, " +
                      std::to_string(initial.size()) + "]");
  auto order = center_outward_order(ParticleConfiguration(initial, Scaling::bulk));
  order.resize(static_cast<std::size_t>(m));
  return order;
}

double tagged_average(const Path& path, const std::vector<Eigen::Index>& idx, Eigen::Index col) {
  double s = 0.0;
  for (auto i : idx) s += path.states(i, col);
  return s / static_cast<double>(idx.size());
}

Eigen::Index nearest_column(const Path& path, double t) {
  const auto it = std::lower_bound(path.times.begin(), path.times.end(), t);
  if (it == path.times.end()) return static_cast<Eigen::Index>(path.times.size() - 1);
  if (it == path.times.begin()) return 0;
  const auto hi = it - path.times.begin();
  return (t - path.times[hi - 1] <= path.times[hi] - t) ? hi - 1 : hi;
}

// Tagged averages per path at each requested time.
std::vector<std::vector<double>> tagged_series(const PathEnsemble& e, int m, const std::vector<double>& times,
                                               std::vector<double>& matched_times) {
  if (e.paths.empty()) throw DomainError("tagged statistics: empty ensemble");
  std::vector<std::vector<double>> out(times.size(), std::vector<double>(e.paths.size()));
  matched_times.assign(times.size(), 0.0);
  for (std::size_t p = 0; p < e.paths.size(); ++p) {
    const auto idx = tagged_indices(e.initial[p], m);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const Eigen::Index col = nearest_column(e.paths[p], times[k]);
      matched_times[k] = e.paths[p].times[static_cast<std::size_t>(col)];
      out[k][p] = tagged_average(e.paths[p], idx, col);
    }
  }
  return out;
}

}  // namespace

MeanEstimate tagged_drift_rate(const PathEnsemble& ensemble, int m) {
  if (ensemble.paths.empty()) throw DomainError("tagged_drift_rate: empty ensemble");
  std::vector<double> rates;
  rates.reserve(ensemble.paths.size());
  for (std::size_t p = 0; p < ensemble.paths.size(); ++p) {
    const auto& path = ensemble.paths[p];
    const auto idx = tagged_indices(ensemble.initial[p], m);
    const auto last = static_cast<Eigen::Index>(path.times.size() - 1);
    rates.push_back((tagged_average(path, idx, last) - tagged_average(path, idx, 0)) / path.times.back());
  }
  return estimate_mean(rates);
}

namespace {

ExperimentReport tagged_report(const PathEnsemble& a, const PathEnsemble* b, int m,
                               const std::vector<double>& times) {
  std::vector<std::string> cols{"time",   "mean",          "variance",   "increment_mean",
                                "increment_se", "drift_rate", "drift_rate_se"};
  if (b) cols.push_back("ks_distance");
  ExperimentReport report("tagged_statistics", cols);
  report.set_meta("tagged_particles", std::to_string(m));
  report.set_meta("paths", std::to_string(a.paths.size()));

  std::vector<double> matched, matched_b;
  const auto series = tagged_series(a, m, times, matched);
  std::vector<std::vector<double>> series_b;
  if (b) series_b = tagged_series(*b, m, times, matched_b);

  std::vector<double> start(a.paths.size());
  for (std::size_t p = 0; p < a.paths.size(); ++p)
    start[p] = tagged_average(a.paths[p], tagged_indices(a.initial[p], m), 0);

  for (std::size_t k = 0; k < times.size(); ++k) {
    const MeanEstimate level = estimate_mean(series[k]);
    std::vector<double> inc(series[k].size());
    for (std::size_t p = 0; p < inc.size(); ++p) inc[p] = series[k][p] - start[p];
    const MeanEstimate increment = estimate_mean(inc);
    const double t = matched[k];
    std::vector<Cell> row{Cell{t},
                          Cell{level.mean},
                          Cell{level.variance},
                          Cell{increment.mean},
                          Cell{increment.standard_error},
                          Cell{t > 0.0 ? increment.mean / t : 0.0},
                          Cell{t > 0.0 ? increment.standard_error / t : 0.0}};
    if (b) row.emplace_back(ks_two_sample(series[k], series_b[k]).statistic);
    report.add_row(std::move(row));
  }
  return report;
}

}  // namespace

ExperimentReport tagged_statistics(const PathEnsemble& ensemble, int m, const std::vector<double>& times) {
  return tagged_report(ensemble, nullptr, m, times);
}

ExperimentReport tagged_statistics(const PathEnsemble& a, const PathEnsemble& b, int m,
                                   const std::vector<double>& times) {
  return tagged_report(a, &b, m, times);
}

}  // namespace dysonlab
