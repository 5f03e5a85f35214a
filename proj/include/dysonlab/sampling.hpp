#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dysonlab/quadrature.hpp"

namespace dysonlab {

/// Coordinates a configuration is expressed in.
///   raw        eigenvalues for the weight exp(-x^2)
///   semicircle x / sqrt(N), limiting density sqrt(2 - x^2)/pi
///   bulk       sqrt(N) x - theta N, limiting density sqrt(2 - theta^2)/pi
enum class Scaling { raw, semicircle, bulk };

/// Strictly increasing particle positions of an N-point ensemble.
class ParticleConfiguration {
 public:
  /// Throws DomainError unless positions are finite and strictly increasing.
  /// `ensemble_size` is the N of the ensemble the positions came from
  /// (defaults to the number of positions).
  explicit ParticleConfiguration(Eigen::VectorXd positions, Scaling scaling = Scaling::raw, double theta = 0.0,
                                 int ensemble_size = -1);

  Eigen::Index size() const { return positions_.size(); }
  int ensemble_size() const { return ensemble_size_; }
  const Eigen::VectorXd& positions() const { return positions_; }
  double operator[](Eigen::Index i) const { return positions_(i); }
  Scaling scaling() const { return scaling_; }
  /// Bulk position; meaningful for Scaling::bulk only.
  double theta() const { return theta_; }

 private:
  Eigen::VectorXd positions_;
  Scaling scaling_;
  double theta_;
  int ensemble_size_;
};

/// Per-draw random stream seeded from (seed, index), so draws can be made in
/// any order or in parallel and still reproduce.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index);

/// N eigenvalues with joint density proportional to
/// prod_{i<j} |x_i - x_j|^2 exp(-sum x_i^2), from the tridiagonal model:
/// diagonal N(0, 1/2), off-diagonal entries sqrt(Gamma(k, 1)/2) for
/// k = N-1, ..., 1.
ParticleConfiguration sample_gue_eigenvalues(int N, std::mt19937_64& rng);
ParticleConfiguration sample_gue_eigenvalues(int N, std::uint64_t seed);

/// `count` independent draws; draw i uses make_stream(seed, i).
std::vector<ParticleConfiguration> sample_gue_batch(int N, std::size_t count, std::uint64_t seed,
                                                    unsigned threads = 1);

/// Raw -> bulk coordinates, y = sqrt(N) x - theta N.
ParticleConfiguration bulk_scale(const ParticleConfiguration& config, double theta);
/// Bulk -> raw coordinates.
ParticleConfiguration bulk_unscale(const ParticleConfiguration& config);
/// Raw -> semicircle coordinates, x / sqrt(N).
ParticleConfiguration semicircle_scale(const ParticleConfiguration& config);

/// Indices of the particles ordered by |position|; on ties the negative
/// particle comes first.
std::vector<Eigen::Index> center_outward_order(const ParticleConfiguration& config);
/// Positions in center-outward label order.
Eigen::VectorXd label_center_outward(const ParticleConfiguration& config);

/// Histogram estimate of the one-point function (expected particle count
/// per unit length).
struct EmpiricalDensity {
  Eigen::VectorXd grid;            ///< bin centres
  Eigen::VectorXd values;          ///< mean count per unit length
  Eigen::VectorXd standard_error;  ///< per bin, across samples
  double bin_width = 0.0;
  std::size_t sample_count = 0;

  /// Sum of values times bin width: expected count in the window.
  double integral() const { return values.sum() * bin_width; }
};

EmpiricalDensity empirical_one_point(std::span<const ParticleConfiguration> samples, Interval window, int bins);

/// CDF of the density sqrt(2 - x^2)/pi on [-sqrt2, sqrt2].
double semicircle_cdf(double x);

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `values` against the
/// semicircle CDF.
double ks_distance_semicircle(std::vector<double> values);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;  ///< asymptotic Kolmogorov distribution
};

/// Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(t) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 t^2).
double kolmogorov_survival(double t);

}  // namespace dysonlab
