#include "dysonlab/hermite.hpp"

#include <algorithm>
#include <string>

#include "dysonlab/errors.hpp"

namespace dysonlab {

namespace {

const double kPiQuarterRoot = std::pow(std::numbers::pi, -0.25);
const double kLog2PiQuarter = 0.25 * std::log2(std::numbers::pi);

// Beyond this |x|, psi_0 = pi^(-1/4) exp(-x^2/2) < 1e-200 and the direct
// recurrence would start from a value near the subnormal range.
constexpr double kUnderflowRadius = 30.0;

// Rescale window for the tracked recurrence.
constexpr double kBig = 0x1p+256;
constexpr double kSmall = 0x1p-256;

void check_finite(double x) {
  if (!std::isfinite(x)) throw DomainError("oscillator wave function: non-finite argument");
}

// Forward sweep psi_0..psi_upto; sink(k, mantissa, exponent) receives each
// value as mantissa * 2^exponent (exponent is 0 in direct mode).
template <typename Sink>
void sweep_direct(const double* up, const double* down, double x, int upto, Sink&& sink) {
  double cur = kPiQuarterRoot * std::exp(-0.5 * x * x);
  double prev = 0.0;
  sink(0, cur, 0L);
  for (int k = 0; k < upto; ++k) {
    const double next = x * up[k] * cur - down[k] * prev;
    prev = cur;
    cur = next;
    sink(k + 1, cur, 0L);
  }
}

template <typename Sink>
void sweep_tracked(const double* up, const double* down, double x, int upto, Sink&& sink) {
  const double log2_psi0 = -0.5 * x * x / std::numbers::ln2 - kLog2PiQuarter;
  long exponent = static_cast<long>(std::floor(log2_psi0));
  double cur = std::exp2(log2_psi0 - static_cast<double>(exponent));
  double prev = 0.0;
  sink(0, cur, exponent);
  for (int k = 0; k < upto; ++k) {
    const double next = x * up[k] * cur - down[k] * prev;
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > kBig || (mag < kSmall && mag > 0.0)) {
      int shift = 0;
      std::frexp(mag, &shift);
      cur = std::ldexp(cur, -shift);
      prev = std::ldexp(prev, -shift);
      exponent += shift;
    }
    sink(k + 1, cur, exponent);
  }
}

ScaledValue normalize(double mantissa, long exponent) {
  if (mantissa == 0.0) return {};
  int e = 0;
  const double m = std::frexp(mantissa, &e);  // |m| in [0.5, 1)
  return {2.0 * m, exponent + e - 1};
}

double to_double(double mantissa, long exponent) {
  if (exponent < -2000) return 0.0;
  return std::ldexp(mantissa, static_cast<int>(exponent));
}

}  // namespace

OscillatorEvaluator::OscillatorEvaluator(int n_max, ScalingPolicy policy)
    : n_max_(n_max), policy_(policy) {
  if (n_max < 0) throw DomainError("OscillatorEvaluator: n_max must be >= 0");
  switch_radius_ = std::min(std::sqrt(2.0 * n_max) + 4.0, kUnderflowRadius);
  up_.resize(static_cast<std::size_t>(n_max) + 1);
  down_.resize(static_cast<std::size_t>(n_max) + 1);
  for (int k = 0; k <= n_max; ++k) {
    up_[k] = std::sqrt(2.0 / (k + 1.0));
    down_[k] = std::sqrt(k / (k + 1.0));
  }
}

bool OscillatorEvaluator::tracks_exponent(double x) const {
  return policy_ == ScalingPolicy::exponent_tracked && std::abs(x) > switch_radius_;
}

void OscillatorEvaluator::run(double x, int upto, double* out) const {
  auto sink = [out](int k, double m, long e) { out[k] = to_double(m, e); };
  if (tracks_exponent(x))
    sweep_tracked(up_.data(), down_.data(), x, upto, sink);
  else
    sweep_direct(up_.data(), down_.data(), x, upto, sink);
}

void OscillatorEvaluator::run_single(double x, int upto, double* out, ScaledValue* scaled) const {
  auto sink = [&](int k, double m, long e) {
    if (k == upto) {
      if (out) *out = to_double(m, e);
      if (scaled) *scaled = normalize(m, e);
    }
  };
  if (tracks_exponent(x))
    sweep_tracked(up_.data(), down_.data(), x, upto, sink);
  else
    sweep_direct(up_.data(), down_.data(), x, upto, sink);
}

double OscillatorEvaluator::operator()(int n, double x) const {
  check_finite(x);
  if (n < 0) return 0.0;
  if (n > n_max_) throw DomainError("OscillatorEvaluator: index " + std::to_string(n) + " exceeds n_max");
  double v = 0.0;
  run_single(x, n, &v, nullptr);
  return v;
}

ScaledValue OscillatorEvaluator::scaled(int n, double x) const {
  check_finite(x);
  if (n < 0) return {};
  if (n > n_max_) throw DomainError("OscillatorEvaluator: index " + std::to_string(n) + " exceeds n_max");
  // Always tracked here: the caller asked for the exponent explicitly.
  ScaledValue s;
  auto sink = [&](int k, double m, long e) {
    if (k == n) s = normalize(m, e);
  };
  sweep_tracked(up_.data(), down_.data(), x, n, sink);
  return s;
}

Eigen::VectorXd OscillatorEvaluator::batch(double x) const {
  Eigen::VectorXd out(n_max_ + 1);
  batch(x, out);
  return out;
}

void OscillatorEvaluator::batch(double x, Eigen::Ref<Eigen::VectorXd> out) const {
  check_finite(x);
  if (out.size() != n_max_ + 1) throw DomainError("OscillatorEvaluator::batch: output size mismatch");
  run(x, n_max_, out.data());
}

double OscillatorEvaluator::derivative(int n, double x) const {
  check_finite(x);
  if (n < 0) return 0.0;
  if (n + 1 > n_max_) throw DomainError("OscillatorEvaluator::derivative: needs n + 1 <= n_max");
  double vals[3];
  top_values(n + 1, x, vals);
  return (std::sqrt(static_cast<double>(n)) * vals[0] - std::sqrt(n + 1.0) * vals[2]) /
         std::numbers::sqrt2;
}

void OscillatorEvaluator::top_values(int top, double x, std::span<double> out) const {
  check_finite(x);
  if (top > n_max_) throw DomainError("OscillatorEvaluator::top_values: top exceeds n_max");
  const int count = static_cast<int>(out.size());
  std::fill(out.begin(), out.end(), 0.0);
  if (top < 0) return;
  const int first = top - count + 1;
  auto sink = [&](int k, double m, long e) {
    if (k >= first) out[k - first] = to_double(m, e);
  };
  if (tracks_exponent(x))
    sweep_tracked(up_.data(), down_.data(), x, top, sink);
  else
    sweep_direct(up_.data(), down_.data(), x, top, sink);
}

double eval_psi(int n, double x) {
  return OscillatorEvaluator(std::max(n, 0))(n, x);
}

Eigen::VectorXd eval_psi_batch(int n_max, double x) {
  return OscillatorEvaluator(n_max).batch(x);
}

double eval_psi_derivative(int n, double x) {
  return OscillatorEvaluator(std::max(n, 0) + 1).derivative(n, x);
}

double plancherel_rotach_bulk(int N, int l, double tau) {
  if (l < -1 || l > 1) throw DomainError("plancherel_rotach_bulk: l must be -1, 0 or 1");
  if (N < 1 || !(tau > 0.0) || tau > std::numbers::pi / 2)
    throw DomainError("plancherel_rotach_bulk: need N >= 1 and 0 < tau <= pi/2");
  const double s = std::sin(tau);
  if (N * s * s * s < 1.0)
    throw DomainError("plancherel_rotach_bulk: out of regime, N sin^3(tau) < 1");
  const double x = std::sqrt(2.0 * N) * std::cos(tau);
  const int n = N + l;
  if (n < 1) throw DomainError("plancherel_rotach_bulk: N + l must be >= 1");
  const double phi = std::acos(x / std::sqrt(2.0 * n + 1.0));
  const double amplitude = std::pow(2.0 / n, 0.25) / std::sqrt(std::numbers::pi * std::sin(phi));
  const double phase = (0.5 * n + 0.25) * (std::sin(2.0 * phi) - 2.0 * phi) + 0.75 * std::numbers::pi;
  return amplitude * std::sin(phase);
}

}  // namespace dysonlab
