#include "dysonlab/estimates.hpp"

#include <algorithm>
#include <string>

#include "dysonlab/errors.hpp"
#include "dysonlab/hermite.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/parallel.hpp"

namespace dysonlab {

BandDecomposition::BandDecomposition(int N, double alpha) : N_(N), alpha_(alpha) {
  if (N < 1) throw DomainError("BandDecomposition: N must be >= 1");
  if (!(alpha > -2.0 / 3.0 && alpha < -0.5))
    throw DomainError("BandDecomposition: alpha must lie in (-2/3, -1/2)");
  half_width_ = std::pow(static_cast<double>(N), alpha);
}

std::array<double, 4> BandDecomposition::edges() const {
  const double s = std::numbers::sqrt2, w = half_width_;
  return {-s - w, -s + w, s - w, s + w};
}

std::array<Interval, 2> BandDecomposition::band() const {
  const auto e = edges();
  return {Interval{e[0], e[1]}, Interval{e[2], e[3]}};
}

Interval BandDecomposition::bulk() const {
  const auto e = edges();
  return {e[1], e[2]};
}

bool BandDecomposition::in_band(double y) const {
  const auto e = edges();
  return (y > e[0] && y < e[1]) || (y > e[2] && y < e[3]);
}

bool BandDecomposition::in_bulk(double y) const {
  const auto e = edges();
  return y >= e[1] && y <= e[2];
}

bool BandDecomposition::in_outer(double y) const {
  const auto e = edges();
  return y <= e[0] || y >= e[3];
}

double BandDecomposition::band_measure() const {
  const auto e = edges();
  if (e[1] < e[2]) return (e[1] - e[0]) + (e[3] - e[2]);
  return e[3] - e[0];  // pieces overlap: one interval
}

TailRegion::TailRegion(int N_, double theta_, double x_, double r_) : N(N_), theta(theta_), x(x_), r(r_) {
  if (N < 2) throw DomainError("tail integral: N must be >= 2");
  check_bulk_position(theta);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("tail integral: r must be positive and finite");
  if (!std::isfinite(x)) throw DomainError("tail integral: x must be finite");
}

std::vector<Interval> TailRegion::truncated(double cutoff) const {
  const double c = centre(), d = inner_radius();
  std::vector<Interval> out;
  if (c - d > -cutoff) out.push_back({-cutoff, std::min(c - d, cutoff)});
  if (c + d < cutoff) out.push_back({std::max(c + d, -cutoff), cutoff});
  return out;
}

namespace {

// Splits intervals at the given points.
std::vector<Interval> split_at(const std::vector<Interval>& ivs, std::span<const double> cuts) {
  std::vector<Interval> out;
  for (const Interval& iv : ivs) {
    std::vector<double> pts{iv.a, iv.b};
    for (double c : cuts)
      if (c > iv.a && c < iv.b) pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back({pts[i], pts[i + 1]});
  }
  return out;
}

// Values of psi_k(sqrt(N) y) needed by the macroscopic kernel.
class MacroSampler {
 public:
  explicit MacroSampler(int N)
      : N_(N), root_n_(std::sqrt(static_cast<double>(N))), cd_scale_(1.0 / std::sqrt(2.0 * N)), psi_(N + 1),
        all_(N + 2) {}

  struct Point {
    double P;     // psi_N(sqrt(N) y)
    double Q;     // psi_{N-1}(sqrt(N) y)
    double diag;  // L^N(y, y)
  };

  Point at(double y) const {
    std::array<double, 4> v{};
    psi_.top_values(N_ + 1, root_n_ * y, v);
    return from_top(v);
  }

  // Full sweep; psi_0..psi_{N+1} stay available through all().
  Point sweep(double y) {
    psi_.batch(root_n_ * y, all_);
    return from_top({N_ >= 2 ? all_(N_ - 2) : 0.0, all_(N_ - 1), all_(N_), all_(N_ + 1)});
  }
  const Eigen::VectorXd& all() const { return all_; }

  // L^N(y, z) for y != z.
  double off_diag(const Point& a, double y, const Point& b, double z) const {
    return cd_scale_ * (a.P * b.Q - a.Q * b.P) / (y - z);
  }
  double cd_scale() const { return cd_scale_; }

 private:
  Point from_top(const std::array<double, 4>& v) const {
    return {v[2], v[1], kernel_diag_from_top_values(N_, v) / root_n_};
  }

  int N_;
  double root_n_;
  double cd_scale_;
  OscillatorEvaluator psi_;
  Eigen::VectorXd all_;
};

enum Component : Eigen::Index {
  kDrift,       // L(y,y) / (c - y)
  kPalmDrift,   // L(c,y)^2 / (|c - y| L_hat)
  kVar1,        // L(y,y) / (N (c - y)^2)
  kPalmVar1,    // L(c,y)^2 / (N (c - y)^2 L_hat)
  kPP,          // P^2 / (c - y)^2
  kQQ,          // Q^2 / (c - y)^2
  kPQ,          // P Q / (c - y)^2
  kPalmLinear,  // L(c,y)^2 / ((c - y) L_hat)
  kControlled,  // psi_k(sqrt(N) y) L(c,y) / (c - y), k < N, follow here
};

struct CoreResult {
  Eigen::VectorXd value, error;
  double centre_diag = 0.0;
  double window = 0.0, window_error = 0.0;
  double tail = 0.0;
};

// Window term of the variance identity:
//   iint_{y in T, z in W} L(y,z)^2 / (c - y)^2,  W = (c - r/N, c + r/N).
// Tensor Gauss-Kronrod, refined by halving the panel width.
void window_term(const TailRegion& region, const TailOptions& opts, CoreResult& out) {
  const int N = region.N;
  MacroSampler sampler(N);
  const double c = region.centre(), d = region.inner_radius();
  const auto tail = region.truncated(opts.cutoff);
  const std::vector<Interval> window{{c - d, c + d}};

  double width = 1.0 / N;
  for (int level = 0;; ++level) {
    const auto ynodes = expand_gk21(subdivide(tail, width));
    const auto znodes = expand_gk21(subdivide(window, width));
    std::vector<double> zp(znodes.x.size()), zq(znodes.x.size());
    for (std::size_t j = 0; j < znodes.x.size(); ++j) {
      const auto p = sampler.at(znodes.x[j]);
      zp[j] = p.P;
      zq[j] = p.Q;
    }
    double kron = 0.0, gauss = 0.0;
    for (std::size_t i = 0; i < ynodes.x.size(); ++i) {
      const double y = ynodes.x[i];
      const auto p = sampler.at(y);
      double row_k = 0.0, row_g = 0.0;
      for (std::size_t j = 0; j < znodes.x.size(); ++j) {
        const double num = (p.P * zq[j] - p.Q * zp[j]) / (y - znodes.x[j]);
        const double v = num * num;
        row_k += znodes.kronrod[j] * v;
        row_g += znodes.gauss[j] * v;
      }
      const double g = 1.0 / ((c - y) * (c - y));
      kron += ynodes.kronrod[i] * g * row_k;
      gauss += ynodes.gauss[i] * g * row_g;
    }
    const double scale = sampler.cd_scale() * sampler.cd_scale();
    out.window = scale * kron;
    out.window_error = scale * std::abs(kron - gauss);
    if (out.window_error <= std::max(opts.rel_tol_2d * std::abs(out.window), opts.abs_tol)) return;
    if (level == 3)
      throw QuadratureError("window double integral: tolerance not reached", out.window_error);
    width *= 0.5;
  }
}

CoreResult evaluate_core(const TailRegion& region, const TailOptions& opts, bool with_expansion, bool with_window) {
  const int N = region.N;
  const double c = region.centre();
  if (!(std::abs(c) + region.inner_radius() < opts.cutoff))
    throw DomainError("tail integral: conditioning window leaves the truncated domain");

  MacroSampler sampler(N);
  const auto centre = sampler.at(c);
  if (!(centre.diag > 0.0)) throw ConditioningPointError("tail integral: L(x_hat, x_hat) is not positive");
  const double centre_diag = centre.diag;

  const BandDecomposition band(N, opts.alpha);
  const auto edges = band.edges();
  std::vector<double> cuts(edges.begin(), edges.end());
  cuts.push_back(-std::numbers::sqrt2);
  cuts.push_back(std::numbers::sqrt2);
  const auto domain = split_at(region.truncated(opts.cutoff), cuts);

  const Eigen::Index dim = kControlled + (with_expansion ? N : 0);
  auto integrand = [&](double y, Eigen::Ref<Eigen::VectorXd> out) {
    const auto p = with_expansion ? sampler.sweep(y) : sampler.at(y);
    const double f = 1.0 / (c - y);
    const double lc = sampler.off_diag(centre, c, p, y);
    const double lc2 = lc * lc / centre_diag;
    out(kDrift) = p.diag * f;
    out(kPalmDrift) = lc2 * std::abs(f);
    out(kVar1) = p.diag * f * f / N;
    out(kPalmVar1) = lc2 * f * f / N;
    out(kPP) = p.P * p.P * f * f;
    out(kQQ) = p.Q * p.Q * f * f;
    out(kPQ) = p.P * p.Q * f * f;
    out(kPalmLinear) = lc2 * f;
    if (with_expansion) out.tail(N) = sampler.all().head(N) * (lc * f);
  };

  QuadratureOptions qopts;
  qopts.rel_tol = opts.rel_tol;
  qopts.abs_tol = opts.abs_tol;
  qopts.max_initial_width = opts.panel_width / N;
  auto q = integrate_adaptive(integrand, std::span<const Interval>(domain), dim, kControlled, qopts);

  CoreResult out;
  out.value = std::move(q.value);
  out.error = std::move(q.error);
  out.centre_diag = centre_diag;
  // L(y,y) decays faster than exp(-(y - cutoff)) beyond the cutoff and every
  // weight above is at most 1 there (|c - y| >= 1), so the neglected mass of
  // each integrand is below the diagonal at the two cut points.
  out.tail = sampler.at(opts.cutoff).diag + sampler.at(-opts.cutoff).diag;
  if (with_window) window_term(region, opts, out);
  return out;
}

TailIntegral make_drift(const TailRegion& region, const CoreResult& core) {
  return {core.value(kDrift) - region.theta, core.error(kDrift) + core.tail, core.tail};
}

TailIntegral make_palm_drift(const CoreResult& core) {
  return {core.value(kPalmDrift), core.error(kPalmDrift) + core.tail, core.tail};
}

// v1 - v2 = window + (I_PP I_QQ - I_PQ^2) / (2N), from the reproducing
// property int L(y,t) L(t,z) dt = L(y,z) / N and
// (y - z)^2 / ((c-y)^2 (c-z)^2) = (1/(c-y) - 1/(c-z))^2.
VarianceTail make_variance(const TailRegion& region, const CoreResult& core) {
  const int N = region.N;
  const double pp = core.value(kPP), qq = core.value(kQQ), pq = core.value(kPQ);
  const double gram = (pp * qq - pq * pq) / (2.0 * N);
  const double gram_err =
      (core.error(kPP) * qq + pp * core.error(kQQ) + 2.0 * std::abs(pq) * core.error(kPQ)) / (2.0 * N);
  VarianceTail v;
  v.v1 = core.value(kVar1);
  v.condition = core.window + gram;
  v.v2 = v.v1 - v.condition;
  v.error = core.error(kVar1) + core.window_error + gram_err + core.tail;
  return v;
}

PalmVarianceTail make_palm_variance(const TailRegion& region, const CoreResult& core) {
  const int N = region.N;
  const auto coeffs = core.value.tail(N);
  const auto coeff_err = core.error.tail(N);
  const double norm = 1.0 / (std::sqrt(static_cast<double>(N)) * core.centre_diag);
  PalmVarianceTail p;
  p.p1 = core.value(kPalmVar1);
  p.p2 = coeffs.squaredNorm() * norm;
  const double s = core.value(kPalmLinear);
  p.p3 = s * s;
  p.condition = p.p1 + 2.0 * p.p2 - p.p3;
  p.error = core.error(kPalmVar1) + 2.0 * norm * 2.0 * coeffs.cwiseAbs().dot(coeff_err) +
            2.0 * std::abs(s) * core.error(kPalmLinear) + core.tail;
  return p;
}

}  // namespace

TailIntegral drift_tail_integral(int N, double theta, double x, double r, const TailOptions& opts) {
  const TailRegion region(N, theta, x, r);
  return make_drift(region, evaluate_core(region, opts, false, false));
}

TailIntegral palm_drift_tail_integral(int N, double theta, double x, double r, const TailOptions& opts) {
  const TailRegion region(N, theta, x, r);
  return make_palm_drift(evaluate_core(region, opts, false, false));
}

VarianceTail variance_tail_integrals(int N, double theta, double x, double r, const TailOptions& opts) {
  const TailRegion region(N, theta, x, r);
  return make_variance(region, evaluate_core(region, opts, false, true));
}

PalmVarianceTail palm_variance_tail_integrals(int N, double theta, double x, double r, const TailOptions& opts) {
  const TailRegion region(N, theta, x, r);
  return make_palm_variance(region, evaluate_core(region, opts, true, false));
}

ConditionValues condition_values(int N, double theta, double x, double r, const TailOptions& opts) {
  const TailRegion region(N, theta, x, r);
  const CoreResult core = evaluate_core(region, opts, true, true);
  return {make_drift(region, core), make_palm_drift(core), make_variance(region, core),
          make_palm_variance(region, core)};
}

DirectDoubleIntegrals tail_double_integrals_direct(int N, double theta, double x, double r, double panel_width,
                                                   double cutoff) {
  const TailRegion region(N, theta, x, r);
  const double c = region.centre();
  MacroSampler sampler(N);
  const auto centre = sampler.at(c);
  if (!(centre.diag > 0.0)) throw ConditioningPointError("tail integral: L(x_hat, x_hat) is not positive");
  const double lhat = centre.diag;

  const auto nodes = expand_gk21(subdivide(region.truncated(cutoff), panel_width / N));
  const std::size_t n = nodes.x.size();
  std::vector<MacroSampler::Point> pts(n);
  std::vector<double> f(n), h(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = sampler.at(nodes.x[i]);
    f[i] = 1.0 / (c - nodes.x[i]);
    h[i] = sampler.off_diag(centre, c, pts[i], nodes.x[i]) * f[i];
  }

  std::array<double, 3> kron{}, gauss{};
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, 3> rk{}, rg{};
    for (std::size_t j = 0; j < n; ++j) {
      const double l = (i == j) ? pts[i].diag : sampler.off_diag(pts[i], nodes.x[i], pts[j], nodes.x[j]);
      const std::array<double, 3> v{l * l * f[i] * f[j], l * h[i] * h[j] / lhat,
                                    h[i] * h[i] * h[j] * h[j] / (f[i] * f[j] * lhat * lhat)};
      for (int k = 0; k < 3; ++k) {
        rk[k] += nodes.kronrod[j] * v[k];
        rg[k] += nodes.gauss[j] * v[k];
      }
    }
    for (int k = 0; k < 3; ++k) {
      kron[k] += nodes.kronrod[i] * rk[k];
      gauss[k] += nodes.gauss[i] * rg[k];
    }
  }
  double err = 0.0;
  for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(kron[k] - gauss[k]));
  return {kron[0], kron[1], kron[2], err};
}

namespace {

double semicircle_density(double y) {
  const double s = 2.0 - y * y;
  return s > 0.0 ? std::sqrt(s) / std::numbers::pi : 0.0;
}

}  // namespace

double pv_semicircle(double theta) {
  check_bulk_position(theta);
  const double root2 = std::numbers::sqrt2;
  const double rho_theta = semicircle_density(theta);
  // Remainder int (rho(y) - rho(theta)) / (theta - y) dy in y = sqrt2 sin t,
  // which is smooth on [-pi/2, pi/2].
  const double slope = theta / (std::numbers::pi * std::sqrt(2.0 - theta * theta));  // -rho'(theta)
  auto remainder = [&](double t) {
    const double y = root2 * std::sin(t);
    const double jac = root2 * std::cos(t);
    const double gap = theta - y;
    if (std::abs(gap) < 1e-9) return slope * jac;
    return (jac / std::numbers::pi - rho_theta) / gap * jac;
  };
  const double t0 = std::asin(theta / root2);
  const std::array<double, 3> breaks{-std::numbers::pi / 2, t0, std::numbers::pi / 2};
  QuadratureOptions qopts;
  qopts.rel_tol = 1e-13;
  qopts.abs_tol = 1e-14;
  const auto rem = integrate_adaptive_scalar(remainder, breaks, qopts);
  return rem.value + rho_theta * std::log((root2 + theta) / (root2 - theta));
}

double semicircle_drift_tail(int N, double theta, double x, double r) {
  const TailRegion region(N, theta, x, r);
  const double root2 = std::numbers::sqrt2;
  const double c = region.centre(), d = region.inner_radius();
  std::vector<Interval> pieces;
  auto to_t = [&](double y) { return std::asin(std::clamp(y / root2, -1.0, 1.0)); };
  if (c - d > -root2) pieces.push_back({-std::numbers::pi / 2, to_t(c - d)});
  if (c + d < root2) pieces.push_back({to_t(c + d), std::numbers::pi / 2});
  auto integrand = [&](double t, Eigen::Ref<Eigen::VectorXd> out) {
    const double y = root2 * std::sin(t);
    const double jac = root2 * std::cos(t);
    out(0) = (jac / std::numbers::pi) * jac / (c - y);
  };
  QuadratureOptions qopts;
  qopts.rel_tol = 1e-12;
  qopts.abs_tol = 1e-14;
  const auto q = integrate_adaptive(integrand, std::span<const Interval>(pieces), 1, 1, qopts);
  return q.value(0) - theta;
}

double band_tail_integral(int N, double theta, double x, double q, double alpha, double cutoff) {
  check_bulk_position(theta);
  if (!(q > 0.0)) throw DomainError("band_tail_integral: q must be positive");
  const BandDecomposition band(N, alpha);
  const double c = x / N + theta;
  const auto bulk = band.bulk();
  if (!(c > bulk.a && c < bulk.b)) throw DomainError("band_tail_integral: x_hat must lie inside the bulk U1");
  const auto e = band.edges();
  std::vector<Interval> pieces;
  if (-cutoff < e[1]) pieces.push_back({-cutoff, e[1]});
  if (e[2] < cutoff) pieces.push_back({e[2], cutoff});
  const std::array<double, 4> cuts{e[0], -std::numbers::sqrt2, std::numbers::sqrt2, e[3]};
  const auto domain = split_at(pieces, cuts);

  MacroSampler sampler(N);
  auto integrand = [&](double y, Eigen::Ref<Eigen::VectorXd> out) {
    out(0) = std::pow(std::max(sampler.at(y).diag, 0.0), q) / std::abs(c - y);
  };
  QuadratureOptions qopts;
  qopts.rel_tol = 1e-8;
  qopts.abs_tol = 1e-14;
  qopts.max_initial_width = 2.0 / N;
  return integrate_adaptive(integrand, std::span<const Interval>(domain), 1, 1, qopts).value(0);
}

ExperimentReport condition_table(double theta, const std::vector<int>& N_list, const std::vector<double>& r_list,
                                 double R, const ConditionTableOptions& opts) {
  check_bulk_position(theta);
  if (N_list.empty() || r_list.empty()) throw DomainError("condition_table: empty N or r list");
  if (!(R >= 0.0)) throw DomainError("condition_table: R must be >= 0");
  if (opts.x_points < 1) throw DomainError("condition_table: x_points must be >= 1");

  std::vector<double> xs(static_cast<std::size_t>(opts.x_points));
  for (int i = 0; i < opts.x_points; ++i)
    xs[i] = opts.x_points == 1 ? 0.0 : -R + 2.0 * R * i / (opts.x_points - 1);

  const std::size_t nx = xs.size(), nr = r_list.size();
  const std::size_t cells = N_list.size() * nr * nx;
  std::vector<std::array<double, 4>> values(cells);
  parallel_for(cells, opts.threads, [&](std::size_t idx) {
    const std::size_t ix = idx % nx, ir = (idx / nx) % nr, iN = idx / (nx * nr);
    const auto v = condition_values(N_list[iN], theta, xs[ix], r_list[ir], opts.tail);
    values[idx] = {std::abs(v.drift.value), std::abs(v.palm_drift.value), std::abs(v.variance.condition),
                   std::abs(v.palm_variance.condition)};
  });

  ExperimentReport report("condition_table", {"N", "r", "drift", "palm_drift", "variance", "palm_variance"});
  report.set_meta("theta", format_number(theta));
  report.set_meta("R", format_number(R));
  report.set_meta("x_points", std::to_string(opts.x_points));
  report.set_meta("alpha", format_number(opts.tail.alpha));
  for (std::size_t iN = 0; iN < N_list.size(); ++iN) {
    for (std::size_t ir = 0; ir < nr; ++ir) {
      std::array<double, 4> sup{};
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const auto& v = values[(iN * nr + ir) * nx + ix];
        for (int k = 0; k < 4; ++k) sup[k] = std::max(sup[k], v[k]);
      }
      report.add_row({Cell{std::int64_t{N_list[iN]}}, Cell{r_list[ir]}, Cell{sup[0]}, Cell{sup[1]}, Cell{sup[2]},
                      Cell{sup[3]}});
    }
  }
  return report;
}

}  // namespace dysonlab
