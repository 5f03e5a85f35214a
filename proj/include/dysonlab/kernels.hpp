#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/LU>

#include "dysonlab/errors.hpp"
#include "dysonlab/hermite.hpp"

namespace dysonlab {

// ---------------------------------------------------------------------------
// Free-function forms.
//
//   K^N(x, y)        = sum_{k<N} psi_k(x) psi_k(y)
//   K_theta^N(x, y)  = K^N((x + N theta)/sqrt(N), (y + N theta)/sqrt(N)) / sqrt(N)
//   L^N(x, y)        = K^N(sqrt(N) x, sqrt(N) y) / sqrt(N)
//                    = K_theta^N(N (x - theta), N (y - theta))
//   sine_theta(x, y) = sin(sqrt(2 - theta^2)(x - y)) / (pi (x - y))
// ---------------------------------------------------------------------------

/// K^N(x, y) by direct summation.
double kernel_sum(int N, double x, double y);

/// K^N(x, y) by the Christoffel-Darboux formula. Falls back to the
/// diagonal form at the midpoint when |x - y| < 1e-8.
double kernel_cd(int N, double x, double y);

/// K^N(x, x) = sqrt(N/2) (psi_{N-1} psi_N' - psi_N psi_{N-1}')(x).
double kernel_diag(int N, double x);

/// K^N(x, x) by the expanded four-term form
/// (N/2)[psi_{N-1}^2 + psi_N^2 - sqrt(1-1/N) psi_{N-2} psi_N - sqrt(1+1/N) psi_{N-1} psi_{N+1}](x).
double kernel_diag_four_term(int N, double x);

/// Bulk-scaled kernel K_theta^N(x, y); requires |theta| < sqrt(2).
double scaled_kernel(int N, double theta, double x, double y);

/// Macroscopic kernel L^N(x, y).
double macro_kernel(int N, double x, double y);

/// Sine kernel; diagonal value sqrt(2 - theta^2)/pi.
double sine_kernel(double theta, double x, double y);

/// K^N(x, x) from psi_{N-2}(x), psi_{N-1}(x), psi_N(x), psi_{N+1}(x) by the
/// derivative form; lets callers that already ran the recurrence skip a
/// second pass.
double kernel_diag_from_top_values(int N, const std::array<double, 4>& top);

/// Throws DomainError unless |theta| < sqrt(2).
void check_bulk_position(double theta);

// ---------------------------------------------------------------------------
// Kernel objects. All are immutable values with `double operator()(x, y)`.
// ---------------------------------------------------------------------------

/// K^N.
class FiniteKernel {
 public:
  explicit FiniteKernel(int N);

  int N() const { return N_; }
  double operator()(double x, double y) const;
  double diag(double x) const;

 private:
  int N_;
  std::shared_ptr<const OscillatorEvaluator> psi_;
};

/// L^N, the kernel of the semicircle-scaled ensemble.
class MacroKernel {
 public:
  explicit MacroKernel(int N) : base_(N), root_n_(std::sqrt(static_cast<double>(N))) {}

  int N() const { return base_.N(); }
  double operator()(double x, double y) const { return base_(root_n_ * x, root_n_ * y) / root_n_; }
  double diag(double x) const { return base_.diag(root_n_ * x) / root_n_; }

 private:
  FiniteKernel base_;
  double root_n_;
};

/// K_theta^N, the kernel of the bulk-scaled ensemble around macro-position theta.
class ScaledKernel {
 public:
  ScaledKernel(int N, double theta);

  int N() const { return macro_.N(); }
  double theta() const { return theta_; }
  double operator()(double x, double y) const { return macro_(to_macro(x), to_macro(y)); }
  double diag(double x) const { return macro_.diag(to_macro(x)); }
  /// x / N + theta.
  double to_macro(double x) const { return x / N() + theta_; }
  const MacroKernel& macro() const { return macro_; }

 private:
  MacroKernel macro_;
  double theta_;
};

/// Sine kernel around macro-position theta.
class SineKernel {
 public:
  explicit SineKernel(double theta);

  double theta() const { return theta_; }
  double density() const { return rate_ / std::numbers::pi; }
  double operator()(double x, double y) const;
  double diag(double) const { return density(); }

 private:
  double theta_;
  double rate_;  // sqrt(2 - theta^2)
};

/// Reduced-Palm kernel K_x(y, z) = K(y, z) - K(y, x) K(x, z) / K(x, x).
template <typename Base>
class PalmKernel {
 public:
  PalmKernel(Base base, double x) : base_(std::move(base)), x_(x), kxx_(base_(x, x)) {
    if (!(kxx_ > 0.0))
      throw ConditioningPointError("palm_kernel: base diagonal at the conditioning point is not positive");
  }

  double point() const { return x_; }
  const Base& base() const { return base_; }
  double operator()(double y, double z) const {
    return base_(y, z) - base_(y, x_) * base_(x_, z) / kxx_;
  }
  double diag(double y) const { return (*this)(y, y); }

 private:
  Base base_;
  double x_;
  double kxx_;
};

template <typename Base>
PalmKernel<Base> palm_kernel(Base base, double x) {
  return PalmKernel<Base>(std::move(base), x);
}

/// Type-erased kernel with a uniform evaluation interface.
class KernelHandle {
 public:
  template <typename K>
  KernelHandle(K kernel, std::string name)
      : eval_([k = std::move(kernel)](double x, double y) { return k(x, y); }), name_(std::move(name)) {}

  double operator()(double x, double y) const { return eval_(x, y); }
  double diag(double x) const { return eval_(x, x); }
  const std::string& name() const { return name_; }

 private:
  std::function<double(double, double)> eval_;
  std::string name_;
};

/// n-point correlation function det[K(x_i, x_j)], n <= 8, by LU with
/// partial pivoting.
template <typename K>
double correlation(const K& kernel, std::span<const double> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n == 0) return 1.0;
  if (n > 8) throw DomainError("correlation: at most 8 points");
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) gram(i, j) = gram(j, i) = kernel(points[i], points[j]);
  if (n == 1) return gram(0, 0);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(gram).determinant();
}

struct CorrelationDifferences {
  double d1;  ///< rho_{theta,x}^1(y) - rho_theta^1(y)
  double d2;  ///< rho_theta^2(y,z) - rho_theta^1(y) rho_theta^1(z)
  double d3;  ///< Palm pair-covariance minus base pair-covariance
};

/// One- and two-point correlation differences between the reduced Palm
/// measure at x and the bulk-scaled ensemble, all in bulk coordinates.
CorrelationDifferences correlation_differences(int N, double theta, double x, double y, double z);

}  // namespace dysonlab
