#include "dysonlab/kernels.hpp"

#include <array>

namespace dysonlab {

namespace {

constexpr double kNearDiagonal = 1e-8;

void check_n(int N) {
  if (N < 1) throw DomainError("kernel: particle number N must be >= 1");
}

// psi_{N-2}, psi_{N-1}, psi_N, psi_{N+1} at x.
std::array<double, 4> top_four(const OscillatorEvaluator& psi, int N, double x) {
  std::array<double, 4> v{};
  psi.top_values(N + 1, x, v);
  return v;
}

}  // namespace

double kernel_diag_from_top_values(int N, const std::array<double, 4>& v) {
  const double n = N;
  // sqrt(2) psi_n' = sqrt(n) psi_{n-1} - sqrt(n+1) psi_{n+1}
  const double dN = (std::sqrt(n) * v[1] - std::sqrt(n + 1.0) * v[3]) / std::numbers::sqrt2;
  const double dNm1 = (std::sqrt(n - 1.0) * v[0] - std::sqrt(n) * v[2]) / std::numbers::sqrt2;
  return std::sqrt(0.5 * n) * (v[1] * dN - v[2] * dNm1);
}

namespace {

double cd_from_values(int N, double x, double y, double psi_nm1_x, double psi_n_x, double psi_nm1_y,
                      double psi_n_y) {
  return std::sqrt(0.5 * N) * (psi_n_x * psi_nm1_y - psi_nm1_x * psi_n_y) / (x - y);
}

}  // namespace

void check_bulk_position(double theta) {
  if (!(std::abs(theta) < std::numbers::sqrt2))
    throw DomainError("bulk position theta must satisfy |theta| < sqrt(2)");
}

double kernel_sum(int N, double x, double y) {
  check_n(N);
  OscillatorEvaluator psi(N - 1);
  return psi.batch(x).dot(psi.batch(y));
}

double kernel_cd(int N, double x, double y) {
  return FiniteKernel(N)(x, y);
}

double kernel_diag(int N, double x) {
  return FiniteKernel(N).diag(x);
}

double kernel_diag_four_term(int N, double x) {
  check_n(N);
  OscillatorEvaluator psi(N + 1);
  const auto v = top_four(psi, N, x);
  const double n = N;
  return 0.5 * n *
         (v[1] * v[1] + v[2] * v[2] - std::sqrt(1.0 - 1.0 / n) * v[0] * v[2] -
          std::sqrt(1.0 + 1.0 / n) * v[1] * v[3]);
}

double scaled_kernel(int N, double theta, double x, double y) {
  return ScaledKernel(N, theta)(x, y);
}

double macro_kernel(int N, double x, double y) {
  return MacroKernel(N)(x, y);
}

double sine_kernel(double theta, double x, double y) {
  return SineKernel(theta)(x, y);
}

FiniteKernel::FiniteKernel(int N) : N_(N) {
  check_n(N);
  psi_ = std::make_shared<const OscillatorEvaluator>(N + 1);
}

double FiniteKernel::operator()(double x, double y) const {
  if (std::abs(x - y) < kNearDiagonal) {
    // K is symmetric, so the first-order Taylor term about the midpoint
    // vanishes.
    return diag(0.5 * (x + y));
  }
  std::array<double, 2> vx{}, vy{};
  psi_->top_values(N_, x, vx);
  psi_->top_values(N_, y, vy);
  return cd_from_values(N_, x, y, vx[0], vx[1], vy[0], vy[1]);
}

double FiniteKernel::diag(double x) const {
  return kernel_diag_from_top_values(N_, top_four(*psi_, N_, x));
}

ScaledKernel::ScaledKernel(int N, double theta) : macro_(N), theta_(theta) {
  check_bulk_position(theta);
}

SineKernel::SineKernel(double theta) : theta_(theta) {
  check_bulk_position(theta);
  rate_ = std::sqrt(2.0 - theta * theta);
}

double SineKernel::operator()(double x, double y) const {
  const double d = x - y;
  const double u = rate_ * d;
  if (std::abs(u) < 1e-4) return rate_ / std::numbers::pi * (1.0 - u * u / 6.0);
  return std::sin(u) / (std::numbers::pi * d);
}

CorrelationDifferences correlation_differences(int N, double theta, double x, double y, double z) {
  const ScaledKernel k(N, theta);
  const double kxx = k(x, x);
  if (!(kxx > 0.0))
    throw ConditioningPointError("correlation_differences: K_theta^N(x, x) is not positive");
  const double kxy = k(x, y), kxz = k(x, z), kyz = k(y, z);
  CorrelationDifferences out;
  out.d1 = -kxy * kxy / kxx;
  out.d2 = -kyz * kyz;
  out.d3 = 2.0 * kyz * kxy * kxz / kxx - (kxy * kxy) * (kxz * kxz) / (kxx * kxx);
  return out;
}

}  // namespace dysonlab
