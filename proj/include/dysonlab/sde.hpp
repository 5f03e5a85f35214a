#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "dysonlab/report.hpp"
#include "dysonlab/sampling.hpp"

namespace dysonlab {

/// Drift of the bulk-scaled N-particle dynamics and its range-truncated
/// infinite-volume proxies. For particle i at x_i:
///   finite_theta     sum_{j != i} 1/(x_i - x_j) - x_i/N - theta
///   finite_plain     sum_{j != i} 1/(x_i - x_j) - x_i/N
///   truncated        sum over |x_i - x_j| < r only
///   truncated_theta  truncated + theta
struct DriftSpec {
  enum class Kind { finite_theta, finite_plain, truncated, truncated_theta };

  Kind kind = Kind::finite_plain;
  int N = 0;
  double theta = 0.0;
  double range = std::numeric_limits<double>::infinity();

  /// Frozen reservoir for the truncated kinds: lattice points at spacing
  /// `reservoir_spacing` below reservoir_low and above reservoir_high stand
  /// in for the particles outside the simulated window. Disabled when the
  /// spacing is 0.
  double reservoir_spacing = 0.0;
  double reservoir_low = 0.0;
  double reservoir_high = 0.0;

  static DriftSpec finite_theta(double theta, int N);
  static DriftSpec finite_plain(int N);
  static DriftSpec truncated(double r);
  static DriftSpec truncated_theta(double r, double theta);

  /// Pads the window [low, high] with lattice points at the sine-kernel
  /// density sqrt(2 - theta^2)/pi of `bulk_theta`.
  DriftSpec with_reservoir(double low, double high, double bulk_theta) const;

  /// Throws DomainError on out-of-domain parameters.
  void validate() const;
  /// Throws DomainError if the spec cannot act on `particles` particles.
  void validate_size(Eigen::Index particles) const;
};

/// Drift of particle i. Throws CollisionError if two coordinates coincide.
double drift(const DriftSpec& spec, Eigen::Index i, const Eigen::VectorXd& state);

/// Drift of every particle, O(n^2). Throws CollisionError on coincident
/// coordinates.
void drift_all(const DriftSpec& spec, const Eigen::VectorXd& state, Eigen::Ref<Eigen::VectorXd> out);

struct IntegrationOptions {
  double dt = 1e-3;
  double T = 1.0;
  /// Store every k-th base step (the initial and final states are always
  /// stored).
  int store_every = 1;
  /// Maximum recursive halvings of a step that breaks particle order.
  int max_halvings = 12;
  /// Taming cap gamma in b dt / (1 + |b| dt / gamma); <= 0 selects
  /// 2 / sqrt(dt), +infinity disables taming.
  double taming_cap = 0.0;
  /// Test hook: drop the Brownian part.
  bool zero_noise = false;
};

/// One labelled trajectory. Column k of `states` is the configuration at
/// `times[k]`; rows keep their initial (ascending) order.
struct Path {
  std::vector<double> times;
  Eigen::MatrixXd states;
  Eigen::VectorXd brownian_terminal;  ///< B_T^i per particle
  std::size_t halvings = 0;           ///< sub-steps created by step halving
};

/// Tamed Euler-Maruyama integration on [0, opts.T] from an ordered state.
/// Throws StepFailure when a step still breaks ordering after
/// opts.max_halvings halvings.
Path integrate(const DriftSpec& spec, const Eigen::VectorXd& initial, std::mt19937_64& rng,
               const IntegrationOptions& opts = {});
Path integrate(const DriftSpec& spec, const ParticleConfiguration& initial, std::uint64_t seed,
               const IntegrationOptions& opts = {});

/// One explicit step x + tamed(b(x)) h + dW, no ordering check.
Eigen::VectorXd euler_step(const DriftSpec& spec, const Eigen::VectorXd& state, const Eigen::VectorXd& dW, double h,
                           double taming_cap);

/// Monte-Carlo ensemble of paths. Path p draws its initial state and noise
/// from make_stream(seed, p), so two ensembles run with the same seed share
/// initial conditions and Brownian increments.
struct PathEnsemble {
  std::vector<Path> paths;
  std::vector<Eigen::VectorXd> initial;  ///< initial state per path
  std::uint64_t seed = 0;
  double dt = 0.0;
  double T = 0.0;

  /// B_T per path as columns (particles x paths).
  Eigen::MatrixXd brownian_terminals() const;
};

/// Initial-state generator, called with the path's stream.
using InitialSampler = std::function<Eigen::VectorXd(std::mt19937_64&)>;

/// Draws from mu_theta^N in bulk coordinates: GUE eigenvalues, then the bulk
/// scaling at theta.
InitialSampler bulk_gue_initial(int N, double theta);

PathEnsemble run_ensemble(const DriftSpec& spec, const InitialSampler& initial, std::size_t paths,
                          std::uint64_t seed, const IntegrationOptions& opts = {}, unsigned threads = 1);

/// Y_t = X_t + theta t at every stored time.
Path shift_transform(const Path& path, double theta);

/// log of exp{(theta/N) sum_i B_T^i - theta^2 T / (2N)}.
double girsanov_log_density(double theta, int N, const Eigen::VectorXd& brownian_terminal, double T);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  double variance = 0.0;  ///< sample variance of the per-path values
  std::size_t samples = 0;
};

MeanEstimate estimate_mean(const std::vector<double>& values);

/// Per-path Girsanov densities exp(log density) and their mean.
MeanEstimate girsanov_mean(const PathEnsemble& ensemble, double theta, int N);

/// Drift-rate estimate: per path, the mean over the m center-outward tagged
/// particles (chosen from the path's initial state) of (X_T - X_0) / T;
/// then the mean and standard error across paths.
MeanEstimate tagged_drift_rate(const PathEnsemble& ensemble, int m);

/// Per stored time in `times` (matched to the nearest stored time): mean and
/// variance across paths of the tagged-particle average, the mean increment
/// since t = 0 with its standard error, and the implied drift rate.
ExperimentReport tagged_statistics(const PathEnsemble& ensemble, int m, const std::vector<double>& times);

/// As above for `a`, plus the two-sample Kolmogorov-Smirnov distance between
/// the tagged-particle averages of `a` and `b` at each time.
ExperimentReport tagged_statistics(const PathEnsemble& a, const PathEnsemble& b, int m,
                                   const std::vector<double>& times);

}  // namespace dysonlab
