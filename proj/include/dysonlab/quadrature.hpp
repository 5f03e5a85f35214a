#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dysonlab/errors.hpp"

namespace dysonlab {

/// Nodes and weights of a fixed rule.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Hermite rule in "function" form: sum_i w_i f(x_i) is exact
/// for f(x) = exp(-x^2) p(x) with deg p <= 2n - 1. The weights are
/// 1 / sum_{k<n} psi_k(x_i)^2, so products of oscillator wave functions can
/// be integrated without forming exp(+x^2).
QuadratureRule gauss_hermite(int n);

/// Gauss 10 / Kronrod 21 pair on [-1, 1].
struct GaussKronrod21 {
  static constexpr int size = 21;
  /// Positive abscissae in descending order, xgk[10] = 0. The Gauss nodes
  /// are xgk[1], xgk[3], ..., xgk[9] with weights gauss_weights()[j / 2].
  static const std::array<double, 11>& abscissae();
  static const std::array<double, 11>& kronrod_weights();
  static const std::array<double, 5>& gauss_weights();
};

struct QuadratureOptions {
  double rel_tol = 1e-7;
  double abs_tol = 1e-14;
  /// Initial panels are no wider than this.
  double max_initial_width = std::numeric_limits<double>::infinity();
  std::size_t max_panels = 1u << 20;
  int max_rounds = 40;
};

struct QuadratureResult {
  Eigen::VectorXd value;
  /// Per component |K21 - G10| summed over panels.
  Eigen::VectorXd error;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
};

/// Closed interval [a, b].
struct Interval {
  double a, b;
  double length() const { return b - a; }
};

/// Splits each interval into equal pieces no wider than max_width. Empty or
/// inverted intervals are dropped.
std::vector<Interval> subdivide(std::span<const Interval> intervals, double max_width);

/// Intervals between consecutive sorted, de-duplicated breakpoints.
std::vector<Interval> intervals_from_breakpoints(std::span<const double> breakpoints);

/// Composite G10/K21 nodes: `kronrod` weights integrate with the 21-point
/// rule, `gauss` weights (zero at Kronrod-only nodes) with the 10-point rule.
struct CompositeNodes {
  std::vector<double> x, kronrod, gauss;
};
CompositeNodes expand_gk21(std::span<const Interval> panels);

/// Adaptive Gauss-Kronrod integration of a vector-valued integrand over a
/// union of disjoint intervals.
///
/// `f(y, out)` writes `dim` values into `out`. Only the first `controlled`
/// components take part in the error test; the rest ride along on the final
/// partition. Panels are bisected until, for every controlled component c,
/// sum |K - G| <= max(rel_tol |I_c|, abs_tol). Throws QuadratureError when the
/// refinement budget runs out.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, std::span<const Interval> domain, Eigen::Index dim,
                                    Eigen::Index controlled, const QuadratureOptions& opts = {}) {
  using Panel = Interval;
  const auto& xgk = GaussKronrod21::abscissae();
  const auto& wgk = GaussKronrod21::kronrod_weights();
  const auto& wg = GaussKronrod21::gauss_weights();

  struct Eval {
    Eigen::VectorXd kronrod, gauss;
  };

  Eigen::VectorXd fval(dim);
  std::size_t evaluations = 0;
  auto eval_panel = [&](const Panel& p) {
    const double centre = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    Eval e{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
    f(centre, fval);
    e.kronrod += wgk[10] * fval;
    for (int j = 0; j < 10; ++j) {
      const double dx = half * xgk[j];
      for (double y : {centre - dx, centre + dx}) {
        f(y, fval);
        e.kronrod += wgk[j] * fval;
        if (j % 2 == 1) e.gauss += wg[j / 2] * fval;
      }
    }
    evaluations += 21;
    e.kronrod *= half;
    e.gauss *= half;
    return e;
  };

  std::vector<Panel> panels = subdivide(domain, opts.max_initial_width);
  if (panels.empty()) return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim), 0, 0};
  std::vector<Eval> evals;
  evals.reserve(panels.size());
  for (const auto& p : panels) evals.push_back(eval_panel(p));

  const Eigen::Index nc = std::min(controlled, dim);
  double total_length = 0.0;
  for (const auto& p : panels) total_length += p.b - p.a;

  for (int round = 0;; ++round) {
    Eigen::VectorXd value = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd error = Eigen::VectorXd::Zero(dim);
    for (const auto& e : evals) {
      value += e.kronrod;
      error += (e.kronrod - e.gauss).cwiseAbs();
    }
    Eigen::VectorXd tol(nc);
    bool ok = true;
    for (Eigen::Index c = 0; c < nc; ++c) {
      tol(c) = std::max(opts.rel_tol * std::abs(value(c)), opts.abs_tol);
      if (!(error(c) <= tol(c))) ok = false;
    }
    if (ok || nc == 0) return {value, error, panels.size(), evaluations};

    if (round >= opts.max_rounds || panels.size() >= opts.max_panels)
      throw QuadratureError("integrate_adaptive: refinement budget exhausted", error.head(nc).maxCoeff());

    // Bisect every panel whose error exceeds its length-proportional share.
    std::vector<Panel> next_panels;
    std::vector<Eval> next_evals;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      const Panel& p = panels[i];
      const double share = (p.b - p.a) / total_length;
      bool split = false;
      for (Eigen::Index c = 0; c < nc && !split; ++c) {
        const double local = std::abs(evals[i].kronrod(c) - evals[i].gauss(c));
        if (local > 0.5 * tol(c) * share) split = true;
      }
      if (split) {
        const double mid = 0.5 * (p.a + p.b);
        for (const Panel& q : {Panel{p.a, mid}, Panel{mid, p.b}}) {
          next_panels.push_back(q);
          next_evals.push_back(eval_panel(q));
        }
      } else {
        next_panels.push_back(p);
        next_evals.push_back(std::move(evals[i]));
      }
    }
    panels = std::move(next_panels);
    evals = std::move(next_evals);
  }
}

template <typename F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints, Eigen::Index dim,
                                    Eigen::Index controlled, const QuadratureOptions& opts = {}) {
  const auto domain = intervals_from_breakpoints(breakpoints);
  return integrate_adaptive(std::forward<F>(f), std::span<const Interval>(domain), dim, controlled, opts);
}

struct ScalarQuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

/// Scalar convenience wrapper around integrate_adaptive.
template <typename F>
ScalarQuadratureResult integrate_adaptive_scalar(F&& f, std::span<const double> breakpoints,
                                                 const QuadratureOptions& opts = {}) {
  auto r = integrate_adaptive([&](double y, Eigen::Ref<Eigen::VectorXd> out) { out(0) = f(y); },
                              breakpoints, 1, 1, opts);
  return {r.value(0), r.error(0), r.panels};
}

/// Composite tensor-product Gauss-Kronrod rule over the product of two
/// panel partitions. `f(y, z)` is scalar. The error estimate compares the
/// K21 x K21 and G10 x G10 tensor rules.
template <typename F>
ScalarQuadratureResult integrate_tensor(F&& f, std::span<const double> y_breaks, std::span<const double> z_breaks,
                                        double max_panel_width) {
  const auto ydom = intervals_from_breakpoints(y_breaks);
  const auto zdom = intervals_from_breakpoints(z_breaks);
  const auto ypanels = subdivide(ydom, max_panel_width);
  const auto zpanels = subdivide(zdom, max_panel_width);
  const CompositeNodes yn = expand_gk21(ypanels);
  const CompositeNodes zn = expand_gk21(zpanels);

  double kron = 0.0, gauss = 0.0;
  for (std::size_t i = 0; i < yn.x.size(); ++i) {
    double row_k = 0.0, row_g = 0.0;
    for (std::size_t j = 0; j < zn.x.size(); ++j) {
      const double v = f(yn.x[i], zn.x[j]);
      row_k += zn.kronrod[j] * v;
      row_g += zn.gauss[j] * v;
    }
    kron += yn.kronrod[i] * row_k;
    gauss += yn.gauss[i] * row_g;
  }
  return {kron, std::abs(kron - gauss), ypanels.size() * zpanels.size()};
}

}  // namespace dysonlab
