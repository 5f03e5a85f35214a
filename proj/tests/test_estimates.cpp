#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dysonlab/errors.hpp"
#include "dysonlab/estimates.hpp"
#include "dysonlab/kernels.hpp"
#include "dysonlab/quadrature.hpp"

using namespace dysonlab;

namespace {

// Breakpoints every `step` across T truncated at the cutoff, for oracle
// integrations that do not share code with the production routes.
std::vector<std::vector<double>> tail_breaks(const TailRegion& t, double cutoff, double step) {
  std::vector<std::vector<double>> out;
  for (const auto& piece : t.truncated(cutoff)) {
    std::vector<double> b{piece.a};
    while (b.back() + step < piece.b) b.push_back(b.back() + step);
    b.push_back(piece.b);
    out.push_back(b);
  }
  return out;
}

double oracle_1d(const TailRegion& t, const std::function<double(double)>& f) {
  QuadratureOptions q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-13;
  double s = 0.0;
  for (const auto& b : tail_breaks(t, std::numbers::sqrt2 + 1.0, 0.5 / t.N))
    s += integrate_adaptive_scalar(f, b, q).value;
  return s;
}

}  // namespace

TEST_SUITE("estimates") {
  TEST_CASE("band decomposition") {
    const BandDecomposition band(256);
    const double w = std::pow(256.0, -0.55);
    CHECK(band.half_width() == doctest::Approx(w));
    const auto e = band.edges();
    CHECK(e[0] == doctest::Approx(-std::numbers::sqrt2 - w));
    CHECK(e[3] == doctest::Approx(std::numbers::sqrt2 + w));
    CHECK(band.band_measure() == doctest::Approx(4 * w));
    for (double y : {-3.0, -1.45, -1.40, 0.0, 1.38, 1.43, 2.0}) {
      const int count = band.in_band(y) + band.in_bulk(y) + band.in_outer(y);
      CHECK(count == 1);
    }
    CHECK(band.in_bulk(0.0));
    CHECK(band.in_band(std::numbers::sqrt2));
    CHECK(band.in_outer(2.0));
    CHECK_THROWS_AS(BandDecomposition(256, -0.5), DomainError);
    CHECK_THROWS_AS(BandDecomposition(256, -0.7), DomainError);
  }

  TEST_CASE("tail region") {
    const TailRegion t(100, 0.5, 2.0, 10.0);
    CHECK(t.centre() == doctest::Approx(0.52));
    CHECK(t.contains(0.63));
    CHECK_FALSE(t.contains(0.6));
    const auto pieces = t.truncated(2.0);
    REQUIRE(pieces.size() == 2);
    CHECK(pieces[0].a == -2.0);
    CHECK(pieces[0].b == doctest::Approx(0.42));
    CHECK(pieces[1].a == doctest::Approx(0.62));
    CHECK(pieces[1].b == 2.0);
    CHECK_THROWS_AS(TailRegion(1, 0.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(TailRegion(10, 0.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(TailRegion(10, 1.5, 0.0, 1.0), DomainError);
  }

  TEST_CASE("principal-value semicircle identity") {
    CHECK(std::abs(pv_semicircle(0.0)) <= 1e-12);
    CHECK(std::abs(pv_semicircle(0.7) - 0.7) <= 1e-6);
    CHECK(std::abs(pv_semicircle(-1.2) + 1.2) <= 1e-6);
  }

  TEST_CASE("semicircle surrogate vanishes as the window shrinks") {
    double prev = 1e9;
    for (int N : {100, 1000, 10000, 100000}) {
      const double v = std::abs(semicircle_drift_tail(N, 0.5, 0.0, 10.0));
      CHECK(v < prev);
      prev = v;
    }
    CHECK(prev <= 1e-3);
  }

  TEST_CASE("drift tail integral") {
    CHECK(std::abs(drift_tail_integral(64, 0.0, 0.0, 4.0).value) <= 1e-9);
    CHECK(std::abs(drift_tail_integral(400, 0.5, 0.0, 10.0).value) <= 0.1);

    const TailRegion t(48, 0.3, 0.5, 3.0);
    const MacroKernel L(48);
    const double ref = oracle_1d(t, [&](double y) { return L(y, y) / (t.centre() - y); }) - 0.3;
    const auto v = drift_tail_integral(48, 0.3, 0.5, 3.0);
    CHECK(v.value == doctest::Approx(ref).epsilon(1e-7));
    CHECK(v.error >= 0.0);
    CHECK(v.tail_bound >= 0.0);
  }

  TEST_CASE("palm drift tail integral") {
    const auto a = palm_drift_tail_integral(400, 0.5, 0.0, 10.0);
    CHECK(a.value >= 0.0);
    CHECK(a.value <= 0.1);
    double prev = 1e9;
    for (double r : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double v = palm_drift_tail_integral(128, 0.5, 0.2, r).value;
      CHECK(v >= 0.0);
      CHECK(v <= prev);
      prev = v;
    }
    const TailRegion t(40, -0.6, 1.0, 2.5);
    const MacroKernel L(40);
    const double c = t.centre(), lcc = L(c, c);
    const double ref = oracle_1d(t, [&](double y) { return L(c, y) * L(c, y) / (std::abs(c - y) * lcc); });
    CHECK(palm_drift_tail_integral(40, -0.6, 1.0, 2.5).value == doctest::Approx(ref).epsilon(1e-7));
  }

  TEST_CASE("variance tail integrals") {
    const auto a = variance_tail_integrals(256, 0.0, 0.0, 4.0);
    const auto b = variance_tail_integrals(256, 0.0, 0.0, 16.0);
    CHECK(a.v1 >= 0.0);
    CHECK(b.v1 <= a.v1);
    const auto c = variance_tail_integrals(256, 0.5, 0.0, 10.0);
    CHECK(std::abs(c.v1 - c.v2) <= 0.15);
    CHECK(c.condition == doctest::Approx(c.v1 - c.v2).epsilon(1e-12));
    CHECK(c.condition >= 0.0);

    const TailRegion t(32, 0.2, -0.5, 2.0);
    const MacroKernel L(32);
    const double centre = t.centre();
    const double v1 = oracle_1d(t, [&](double y) { return L(y, y) / (32.0 * (centre - y) * (centre - y)); });
    CHECK(variance_tail_integrals(32, 0.2, -0.5, 2.0).v1 == doctest::Approx(v1).epsilon(1e-7));
  }

  TEST_CASE("palm variance tail integrals") {
    const auto p = palm_variance_tail_integrals(256, 0.5, 0.0, 10.0);
    CHECK(p.p1 >= 0.0);
    CHECK(p.p3 >= 0.0);
    CHECK(std::abs(p.condition) <= 0.2);
    CHECK(p.condition == doctest::Approx(p.p1 + 2 * p.p2 - p.p3).epsilon(1e-12));
  }

  TEST_CASE("double integrals agree with the brute-force tensor route") {
    for (const auto& [N, theta, x, r] : std::vector<std::tuple<int, double, double, double>>{
             {16, 0.5, 0.0, 2.0}, {24, -0.3, 0.7, 4.0}, {32, 0.5, 1.0, 8.0}}) {
      const auto direct = tail_double_integrals_direct(N, theta, x, r, 0.5);
      const auto var = variance_tail_integrals(N, theta, x, r);
      const auto palm = palm_variance_tail_integrals(N, theta, x, r);
      const double scale = std::max(1.0, std::abs(direct.v2));
      CHECK(std::abs(var.v2 - direct.v2) <= 1e-6 * scale);
      CHECK(std::abs(palm.p2 - direct.p2) <= 1e-6 * std::max(1.0, std::abs(direct.p2)));
      CHECK(std::abs(palm.p3 - direct.p3) <= 1e-6 * std::max(1.0, std::abs(direct.p3)));
    }
  }

  TEST_CASE("tensor rule is symmetric under swapping the axes") {
    const MacroKernel L(16);
    const double c = 0.3;
    const std::array<double, 3> yb{-2.0, 0.0, 0.25};
    const std::array<double, 2> zb{0.4, 2.0};
    auto f = [&](double y, double z) { return L(y, z) * L(y, z) / ((c - y) * (c - z)); };
    const double a = integrate_tensor(f, yb, zb, 0.1).value;
    const double b = integrate_tensor([&](double z, double y) { return f(y, z); }, zb, yb, 0.1).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
  }

  TEST_CASE("shared pass matches the individual routes") {
    const auto all = condition_values(64, 0.5, 0.5, 8.0);
    CHECK(all.drift.value == doctest::Approx(drift_tail_integral(64, 0.5, 0.5, 8.0).value).epsilon(1e-12));
    CHECK(all.palm_drift.value == doctest::Approx(palm_drift_tail_integral(64, 0.5, 0.5, 8.0).value).epsilon(1e-12));
    CHECK(all.variance.condition ==
          doctest::Approx(variance_tail_integrals(64, 0.5, 0.5, 8.0).condition).epsilon(1e-12));
    CHECK(all.palm_variance.condition ==
          doctest::Approx(palm_variance_tail_integrals(64, 0.5, 0.5, 8.0).condition).epsilon(1e-12));
  }

  TEST_CASE("band tail integral") {
    const int N = 64;
    const BandDecomposition band(N);
    const auto e = band.edges();
    const MacroKernel L(N);
    QuadratureOptions q;
    q.rel_tol = 1e-10;
    const double c = 0.1 / N + 0.2;
    auto f = [&](double y) { return L(y, y) / std::abs(c - y); };
    const std::array<double, 3> left{-std::numbers::sqrt2 - 1.0, -std::numbers::sqrt2, e[1]};
    const std::array<double, 3> right{e[2], std::numbers::sqrt2, std::numbers::sqrt2 + 1.0};
    const double ref = integrate_adaptive_scalar(f, left, q).value + integrate_adaptive_scalar(f, right, q).value;
    CHECK(band_tail_integral(N, 0.2, 0.1, 1.0) == doctest::Approx(ref).epsilon(1e-7));
    CHECK_THROWS_AS(band_tail_integral(N, 0.2, 0.1, 0.0), DomainError);
  }

  TEST_CASE("condition table") {
    ConditionTableOptions opts;
    opts.x_points = 3;
    const std::vector<int> Ns{32, 64};
    const std::vector<double> rs{2.0, 8.0};
    const auto table = condition_table(0.5, Ns, rs, 1.0, opts);
    REQUIRE(table.rows.size() == 4);
    CHECK(table.columns == std::vector<std::string>{"N", "r", "drift", "palm_drift", "variance", "palm_variance"});
    // Row (N=64, r=8) is the sup of |drift| over x in {-1, 0, 1}.
    double sup = 0.0;
    for (double x : {-1.0, 0.0, 1.0}) sup = std::max(sup, std::abs(drift_tail_integral(64, 0.5, x, 8.0).value));
    CHECK(table.number(3, "drift") == doctest::Approx(sup).epsilon(1e-12));
    CHECK(table.number(3, "N") == 64);
    CHECK(table.number(3, "r") == 8.0);
    for (std::size_t i = 0; i < 4; i += 2) {
      CHECK(table.number(i + 1, "palm_drift") <= table.number(i, "palm_drift"));
      CHECK(table.number(i + 1, "variance") <= table.number(i, "variance"));
    }

    opts.threads = 3;
    const auto threaded = condition_table(0.5, Ns, rs, 1.0, opts);
    for (std::size_t i = 0; i < 4; ++i)
      for (const auto& col : table.columns) CHECK(threaded.number(i, col) == table.number(i, col));
  }

  TEST_CASE("edge-band integrals decay along N") {
    for (double q : {0.5, 1.0, 1.4}) {
      double prev = INFINITY;
      for (int N : {64, 256, 1024}) {
        const double v = band_tail_integral(N, 0.5, 0.0, q);
        CHECK(v > 0.0);
        CHECK(v < 1.1 * prev);
        CHECK(v < prev);
        prev = v;
      }
    }
  }
}
