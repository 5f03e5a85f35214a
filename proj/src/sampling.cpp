#include "dysonlab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "dysonlab/errors.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/parallel.hpp"
#include "dysonlab/tridiagonal.hpp"

namespace dysonlab {

ParticleConfiguration::ParticleConfiguration(Eigen::VectorXd positions, Scaling scaling, double theta,
                                             int ensemble_size)
    : positions_(std::move(positions)),
      scaling_(scaling),
      theta_(theta),
      ensemble_size_(ensemble_size < 0 ? static_cast<int>(positions_.size()) : ensemble_size) {
  for (Eigen::Index i = 0; i < positions_.size(); ++i) {
    if (!std::isfinite(positions_(i))) throw DomainError("ParticleConfiguration: non-finite position");
    if (i > 0 && !(positions_(i) > positions_(i - 1)))
      throw DomainError("ParticleConfiguration: positions must be strictly increasing");
  }
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

ParticleConfiguration sample_gue_eigenvalues(int N, std::mt19937_64& rng) {
  if (N < 1) throw DomainError("sample_gue_eigenvalues: N must be >= 1");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Eigen::VectorXd diag(N), off(N - 1);
  for (int i = 0; i < N; ++i) diag(i) = gauss(rng);
  for (int i = 0; i + 1 < N; ++i) {
    std::gamma_distribution<double> gamma(static_cast<double>(N - 1 - i), 1.0);
    off(i) = std::sqrt(0.5 * gamma(rng));
  }
  Eigen::VectorXd eig = tridiagonal_eigenvalues(diag, off);
  // Coincident eigenvalues have probability zero; reject them rather than
  // hand out an invalid configuration.
  for (Eigen::Index i = 1; i < eig.size(); ++i)
    if (!(eig(i) > eig(i - 1))) throw NumericError("sample_gue_eigenvalues: coincident eigenvalues");
  return ParticleConfiguration(std::move(eig), Scaling::raw, 0.0, N);
}

ParticleConfiguration sample_gue_eigenvalues(int N, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  return sample_gue_eigenvalues(N, rng);
}

std::vector<ParticleConfiguration> sample_gue_batch(int N, std::size_t count, std::uint64_t seed,
                                                    unsigned threads) {
  std::vector<std::optional<ParticleConfiguration>> slots(count);
  parallel_for(count, threads, [&](std::size_t i) {
    auto rng = make_stream(seed, i);
    slots[i].emplace(sample_gue_eigenvalues(N, rng));
  });
  std::vector<ParticleConfiguration> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

ParticleConfiguration bulk_scale(const ParticleConfiguration& config, double theta) {
  if (config.scaling() != Scaling::raw) throw DomainError("bulk_scale: configuration must be in raw scaling");
  check_bulk_position(theta);
  const double n = config.ensemble_size();
  Eigen::VectorXd y = std::sqrt(n) * config.positions().array() - theta * n;
  return ParticleConfiguration(std::move(y), Scaling::bulk, theta, config.ensemble_size());
}

ParticleConfiguration bulk_unscale(const ParticleConfiguration& config) {
  if (config.scaling() != Scaling::bulk) throw DomainError("bulk_unscale: configuration must be in bulk scaling");
  const double n = config.ensemble_size();
  Eigen::VectorXd x = (config.positions().array() + config.theta() * n) / std::sqrt(n);
  return ParticleConfiguration(std::move(x), Scaling::raw, 0.0, config.ensemble_size());
}

ParticleConfiguration semicircle_scale(const ParticleConfiguration& config) {
  if (config.scaling() != Scaling::raw) throw DomainError("semicircle_scale: configuration must be in raw scaling");
  Eigen::VectorXd x = config.positions() / std::sqrt(static_cast<double>(config.ensemble_size()));
  return ParticleConfiguration(std::move(x), Scaling::semicircle, 0.0, config.ensemble_size());
}

std::vector<Eigen::Index> center_outward_order(const ParticleConfiguration& config) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(config.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
  const auto& p = config.positions();
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double aa = std::abs(p(a)), ab = std::abs(p(b));
    if (aa != ab) return aa < ab;
    return p(a) < p(b);
  });
  return idx;
}

Eigen::VectorXd label_center_outward(const ParticleConfiguration& config) {
  const auto order = center_outward_order(config);
  Eigen::VectorXd out(config.size());
  for (std::size_t i = 0; i < order.size(); ++i) out(static_cast<Eigen::Index>(i)) = config[order[i]];
  return out;
}

EmpiricalDensity empirical_one_point(std::span<const ParticleConfiguration> samples, Interval window, int bins) {
  if (!(window.b > window.a)) throw DomainError("empirical_one_point: empty window");
  if (bins < 1) throw DomainError("empirical_one_point: bins must be >= 1");
  EmpiricalDensity d;
  d.bin_width = (window.b - window.a) / bins;
  d.sample_count = samples.size();
  d.grid.resize(bins);
  for (int k = 0; k < bins; ++k) d.grid(k) = window.a + (k + 0.5) * d.bin_width;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins), sum_sq = Eigen::VectorXd::Zero(bins);
  Eigen::VectorXd counts(bins);
  for (const auto& s : samples) {
    counts.setZero();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double v = s[i];
      if (v < window.a || v >= window.b) continue;
      const int k = std::min(bins - 1, static_cast<int>((v - window.a) / d.bin_width));
      counts(k) += 1.0;
    }
    counts /= d.bin_width;
    sum += counts;
    sum_sq += counts.cwiseAbs2();
  }
  const double n = static_cast<double>(samples.size());
  d.values = n > 0 ? Eigen::VectorXd(sum / n) : Eigen::VectorXd::Zero(bins);
  d.standard_error = Eigen::VectorXd::Zero(bins);
  if (n > 1) {
    const Eigen::VectorXd var = ((sum_sq - n * d.values.cwiseAbs2()) / (n - 1.0)).cwiseMax(0.0);
    d.standard_error = (var / n).cwiseSqrt();
  }
  return d;
}

double semicircle_cdf(double x) {
  const double s = std::numbers::sqrt2;
  if (x <= -s) return 0.0;
  if (x >= s) return 1.0;
  return 0.5 + x * std::sqrt(2.0 - x * x) / (2.0 * std::numbers::pi) + std::asin(x / s) / std::numbers::pi;
}

double ks_distance_semicircle(std::vector<double> values) {
  if (values.empty()) throw DomainError("ks_distance_semicircle: no values");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = semicircle_cdf(values[i]);
    d = std::max({d, (i + 1.0) / n - f, f - i / n});
  }
  return d;
}

double kolmogorov_survival(double t) {
  if (t < 0.2) return 1.0;  // series converges slowly here; Q(0.2) = 1 - 1e-11
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace dysonlab
