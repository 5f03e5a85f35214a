#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "dysonlab/quadrature.hpp"
#include "dysonlab/report.hpp"

namespace dysonlab {

// Tail integrals of the macroscopic kernel L^N around the conditioning point
// x_hat = x/N + theta, over T = {y : |x_hat - y| >= r/N}. T is truncated to
// |y| <= sqrt(2) + 1; beyond that L^N(y, y) is below 1e-30 for N >= 64 and
// the neglected mass is reported through `tail_bound`.

/// Bulk / band / outer split of the real line at the spectral edges.
///   band  B  = (-sqrt2 - N^a, -sqrt2 + N^a) u (sqrt2 - N^a, sqrt2 + N^a)
///   bulk  U1 = [-sqrt2 + N^a, sqrt2 - N^a]
///   outer U2 = R \ (-sqrt2 - N^a, sqrt2 + N^a)
class BandDecomposition {
 public:
  static constexpr double default_alpha = -0.55;

  /// Requires N >= 1 and -2/3 < alpha < -1/2.
  explicit BandDecomposition(int N, double alpha = default_alpha);

  int N() const { return N_; }
  double alpha() const { return alpha_; }
  /// N^alpha.
  double half_width() const { return half_width_; }

  /// The four band edges -sqrt2 - w, -sqrt2 + w, sqrt2 - w, sqrt2 + w.
  std::array<double, 4> edges() const;
  /// The two open band intervals.
  std::array<Interval, 2> band() const;
  Interval bulk() const;

  bool in_band(double y) const;
  bool in_bulk(double y) const;
  bool in_outer(double y) const;

  /// Lebesgue measure of the band, 4 N^alpha whenever the two pieces are
  /// disjoint (N^alpha < sqrt2).
  double band_measure() const;

 private:
  int N_;
  double alpha_;
  double half_width_;
};

/// The tail region T_{r,inf}(x) = {y : r/N <= |x_hat - y|}.
struct TailRegion {
  int N;
  double theta;
  double x;
  double r;

  TailRegion(int N, double theta, double x, double r);

  double centre() const { return x / N + theta; }
  double inner_radius() const { return r / N; }
  bool contains(double y) const { return std::abs(centre() - y) >= inner_radius(); }
  /// T intersected with [-cutoff, cutoff], as at most two intervals.
  std::vector<Interval> truncated(double cutoff) const;
};

struct TailOptions {
  double rel_tol = 1e-7;        ///< 1-D integrals
  double abs_tol = 1e-11;
  double rel_tol_2d = 1e-5;     ///< the window double integral
  double cutoff = std::numbers::sqrt2 + 1.0;
  double alpha = BandDecomposition::default_alpha;
  /// Seed panel width in units of 1/N.
  double panel_width = 2.0;
};

struct TailIntegral {
  double value = 0.0;
  double error = 0.0;       ///< quadrature estimate plus truncation bound
  double tail_bound = 0.0;  ///< bound on the mass beyond the cutoff
};

/// Condition (4.7): int_T L(y,y)/(x_hat - y) dy - theta.
TailIntegral drift_tail_integral(int N, double theta, double x, double r, const TailOptions& opts = {});

/// Condition (4.8): int_T L(x_hat,y)^2 / (|x_hat - y| L(x_hat,x_hat)) dy (nonnegative).
TailIntegral palm_drift_tail_integral(int N, double theta, double x, double r, const TailOptions& opts = {});

struct VarianceTail {
  double v1 = 0.0;  ///< int_T L(y,y) / (N (x_hat - y)^2) dy
  double v2 = 0.0;  ///< iint_{TxT} L(y,z)^2 / ((x_hat - y)(x_hat - z)) dy dz
  /// v1 - v2, assembled from nonnegative pieces (see estimates.cpp) rather
  /// than by subtraction.
  double condition = 0.0;
  double error = 0.0;
};

/// Condition (4.9).
VarianceTail variance_tail_integrals(int N, double theta, double x, double r, const TailOptions& opts = {});

struct PalmVarianceTail {
  double p1 = 0.0;  ///< int_T L(x_hat,y)^2 / (N (x_hat-y)^2 L_hat) dy
  double p2 = 0.0;  ///< iint L(y,z) L(x_hat,y) L(x_hat,z) / (L_hat (x_hat-y)(x_hat-z))
  double p3 = 0.0;  ///< iint L(x_hat,y)^2 L(x_hat,z)^2 / (L_hat^2 (x_hat-y)(x_hat-z))
  double condition = 0.0;  ///< p1 + 2 p2 - p3
  double error = 0.0;
};

/// Condition (4.10).
PalmVarianceTail palm_variance_tail_integrals(int N, double theta, double x, double r,
                                              const TailOptions& opts = {});

/// All four conditions from one shared integration pass.
struct ConditionValues {
  TailIntegral drift;
  TailIntegral palm_drift;
  VarianceTail variance;
  PalmVarianceTail palm_variance;
};
ConditionValues condition_values(int N, double theta, double x, double r, const TailOptions& opts = {});

/// Reference routes for small N: the double integrals v2, p2 and p3 by
/// brute-force tensor Gauss-Kronrod over T x T with panels of width
/// panel_width / N. Cost grows like N^2 panels; meant for N <= 64.
struct DirectDoubleIntegrals {
  double v2, p2, p3, error;
};
DirectDoubleIntegrals tail_double_integrals_direct(int N, double theta, double x, double r, double panel_width = 1.0,
                                                   double cutoff = std::numbers::sqrt2 + 1.0);

/// P.V. int_{-sqrt2}^{sqrt2} (1/pi) sqrt(2 - y^2) / (theta - y) dy, by
/// subtracting the singular part analytically. Equals theta.
double pv_semicircle(double theta);

/// (4.7) with L(y,y) replaced by the semicircle density (1/pi) sqrt(2-y^2)_+.
double semicircle_drift_tail(int N, double theta, double x, double r);

/// int over R \ U1 of L(y,y)^q / |x_hat - y| dy, truncated at the cutoff.
double band_tail_integral(int N, double theta, double x, double q, double alpha = BandDecomposition::default_alpha,
                          double cutoff = std::numbers::sqrt2 + 1.0);

struct ConditionTableOptions {
  int x_points = 41;
  unsigned threads = 1;
  TailOptions tail;
};

/// For every (N, r), the sup over an equispaced x grid on [-R, R] of the
/// magnitude of each of the four condition values. Rows are ordered by N,
/// then r. Columns: N, r, drift, palm_drift, variance, palm_variance.
ExperimentReport condition_table(double theta, const std::vector<int>& N_list, const std::vector<double>& r_list,
                                 double R = 1.0, const ConditionTableOptions& opts = {});

}  // namespace dysonlab
