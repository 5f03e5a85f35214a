#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dysonlab {

/// Oscillator wave functions
///
///   psi_n(x) = (sqrt(pi) 2^n n!)^(-1/2) exp(-x^2/2) H_n(x),
///
/// evaluated by the normalized three-term recurrence
///
///   psi_{k+1} = x sqrt(2/(k+1)) psi_k - sqrt(k/(k+1)) psi_{k-1},
///   psi_0     = pi^(-1/4) exp(-x^2/2).
///
/// Forward recurrence is stable inside the oscillatory region
/// |x| <= sqrt(2n); outside it the values decay and only absolute accuracy
/// is kept, which is all the kernel sums need.

enum class ScalingPolicy {
  direct,            ///< plain doubles; exp(-x^2/2) underflows near |x| ~ 38
  exponent_tracked,  ///< mantissa/exponent pairs once |x| > min(sqrt(2 n_max) + 4, 30)
};

/// A value m * 2^e with m in [1, 2) (or m == 0).
struct ScaledValue {
  double mantissa = 0.0;
  long exponent = 0;

  double value() const { return std::ldexp(mantissa, static_cast<int>(exponent)); }
  /// log|value|, finite unless the value is exactly zero.
  double log_abs() const {
    return std::log(std::abs(mantissa)) + static_cast<double>(exponent) * std::numbers::ln2;
  }
};

/// Plain forward recurrence for any real scalar type (double, long double,
/// multiprecision types). Fills out[0..out.size()-1].
template <typename Derived>
void psi_recurrence(const typename Derived::Scalar& x, Eigen::MatrixBase<Derived>& out) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::sqrt;
  const Eigen::Index n = out.size();
  if (n == 0) return;
  const Scalar pi = Scalar(std::numbers::pi_v<long double>);
  Scalar cur = exp(-x * x / Scalar(2)) / sqrt(sqrt(pi));
  Scalar prev = Scalar(0);
  out(0) = cur;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const Scalar kk = Scalar(static_cast<long>(k));
    Scalar next = x * sqrt(Scalar(2) / (kk + Scalar(1))) * cur - sqrt(kk / (kk + Scalar(1))) * prev;
    prev = cur;
    cur = next;
    out(k + 1) = cur;
  }
}

/// Immutable evaluator of psi_0..psi_{n_max}. Recurrence coefficients are
/// tabulated once, so repeated batch evaluation (kernel sums, quadrature
/// nodes) costs one multiply-add pair per index.
class OscillatorEvaluator {
 public:
  explicit OscillatorEvaluator(int n_max, ScalingPolicy policy = ScalingPolicy::exponent_tracked);

  int n_max() const { return n_max_; }
  ScalingPolicy policy() const { return policy_; }

  /// True when evaluation at x runs in exponent-tracked arithmetic.
  bool tracks_exponent(double x) const;

  /// psi_n(x), 0 <= n <= n_max.
  double operator()(int n, double x) const;

  /// psi_n(x) with its binary exponent kept separately.
  ScaledValue scaled(int n, double x) const;

  /// psi_0(x) .. psi_{n_max}(x) in a single pass.
  Eigen::VectorXd batch(double x) const;
  /// Same, writing into out (size n_max + 1).
  void batch(double x, Eigen::Ref<Eigen::VectorXd> out) const;

  /// psi_n'(x) from sqrt(2) psi_n' = sqrt(n) psi_{n-1} - sqrt(n+1) psi_{n+1};
  /// requires n + 1 <= n_max.
  double derivative(int n, double x) const;

  /// The last out.size() values psi_{top-size+1}(x) .. psi_top(x), top <=
  /// n_max, without storing the rest of the sequence. Negative indices are 0.
  void top_values(int top, double x, std::span<double> out) const;

 private:
  void run(double x, int upto, double* out) const;
  void run_single(double x, int upto, double* out, ScaledValue* scaled) const;

  int n_max_;
  ScalingPolicy policy_;
  double switch_radius_;
  std::vector<double> up_;    // sqrt(2/(k+1))
  std::vector<double> down_;  // sqrt(k/(k+1))
};

double eval_psi(int n, double x);
Eigen::VectorXd eval_psi_batch(int n_max, double x);
double eval_psi_derivative(int n, double x);

/// Leading-order Plancherel-Rotach approximation of psi_{N+l} at
/// sqrt(2N) cos(tau), l in {-1, 0, 1}, 0 < tau <= pi/2. Throws DomainError
/// unless N sin^3(tau) >= 1.
double plancherel_rotach_bulk(int N, int l, double tau);

}  // namespace dysonlab
