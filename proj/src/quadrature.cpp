#include "dysonlab/quadrature.hpp"

#include <numbers>

#include "dysonlab/hermite.hpp"
#include "dysonlab/tridiagonal.hpp"

namespace dysonlab {

const std::array<double, 11>& GaussKronrod21::abscissae() {
  static const std::array<double, 11> xgk = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.0};
  return xgk;
}

const std::array<double, 11>& GaussKronrod21::kronrod_weights() {
  static const std::array<double, 11> wgk = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077600525086300, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  return wgk;
}

const std::array<double, 5>& GaussKronrod21::gauss_weights() {
  static const std::array<double, 5> wg = {
      0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
      0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
      0.295524224714752870173892994651338};
  return wg;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  QuadratureRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes(i) = -x;
    rule.nodes(n - 1 - i) = x;
    rule.weights(i) = rule.weights(n - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: n must be >= 1");
  // Nodes: eigenvalues of the Jacobi matrix of the weight exp(-x^2), polished
  // by Newton on psi_n with psi_n' = -x psi_n + sqrt(2n) psi_{n-1}.
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * k);
  Eigen::VectorXd nodes = tridiagonal_eigenvalues(Eigen::VectorXd::Zero(n), off);

  OscillatorEvaluator psi(n);
  Eigen::VectorXd vals(n + 1);
  QuadratureRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    double x = nodes(i);
    for (int iter = 0; iter < 3; ++iter) {
      psi.batch(x, vals);
      const double d = -x * vals(n) + std::sqrt(2.0 * n) * vals(n - 1);
      if (d == 0.0) break;
      x -= vals(n) / d;
    }
    psi.batch(x, vals);
    rule.nodes(i) = x;
    rule.weights(i) = 1.0 / vals.head(n).squaredNorm();
  }
  return rule;
}

std::vector<Interval> subdivide(std::span<const Interval> intervals, double max_width) {
  std::vector<Interval> panels;
  for (const Interval& iv : intervals) {
    const double len = iv.b - iv.a;
    if (!(len > 0.0)) continue;
    const auto pieces = std::isfinite(max_width) && max_width > 0.0
                            ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_width)))
                            : std::size_t{1};
    const double step = len / static_cast<double>(pieces);
    for (std::size_t j = 0; j < pieces; ++j) {
      const double a = iv.a + step * static_cast<double>(j);
      const double b = (j + 1 == pieces) ? iv.b : iv.a + step * static_cast<double>(j + 1);
      panels.push_back({a, b});
    }
  }
  return panels;
}

std::vector<Interval> intervals_from_breakpoints(std::span<const double> breakpoints) {
  std::vector<double> pts(breakpoints.begin(), breakpoints.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) out.push_back({pts[i], pts[i + 1]});
  return out;
}

CompositeNodes expand_gk21(std::span<const Interval> panels) {
  const auto& xgk = GaussKronrod21::abscissae();
  const auto& wgk = GaussKronrod21::kronrod_weights();
  const auto& wg = GaussKronrod21::gauss_weights();
  CompositeNodes n;
  n.x.reserve(21 * panels.size());
  n.kronrod.reserve(21 * panels.size());
  n.gauss.reserve(21 * panels.size());
  for (const auto& p : panels) {
    const double c = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a);
    n.x.push_back(c);
    n.kronrod.push_back(h * wgk[10]);
    n.gauss.push_back(0.0);
    for (int j = 0; j < 10; ++j) {
      for (double s : {-1.0, 1.0}) {
        n.x.push_back(c + s * h * xgk[j]);
        n.kronrod.push_back(h * wgk[j]);
        n.gauss.push_back(j % 2 == 1 ? h * wg[j / 2] : 0.0);
      }
    }
  }
  return n;
}

}  // namespace dysonlab
