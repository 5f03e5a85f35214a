#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "dysonlab/errors.hpp"
#include "dysonlab/hermite.hpp"
#include "dysonlab/quadrature.hpp"

using namespace dysonlab;
using BigFloat = boost::multiprecision::cpp_dec_float_50;

namespace {

// psi_0..psi_n at x from the physicists' Hermite polynomials
// H_{k+1} = 2x H_k - 2k H_{k-1} and the explicit normalisation, in 50 digits.
std::vector<BigFloat> psi_oracle(int n, const BigFloat& x) {
  const BigFloat pi = boost::math::constants::pi<BigFloat>();
  std::vector<BigFloat> out(n + 1);
  BigFloat h_prev = 0, h = 1;
  const BigFloat gauss = exp(-x * x / 2);
  BigFloat norm_sq = sqrt(pi);  // sqrt(pi) 2^k k!
  for (int k = 0; k <= n; ++k) {
    out[k] = gauss * h / sqrt(norm_sq);
    const BigFloat next = 2 * x * h - 2 * k * h_prev;
    h_prev = h;
    h = next;
    norm_sq *= 2 * (k + 1);
  }
  return out;
}

}  // namespace

TEST_SUITE("hermite") {
  TEST_CASE("values at the origin") {
    CHECK(eval_psi(0, 0.0) == doctest::Approx(0.7511255444).epsilon(1e-10));
    CHECK(eval_psi(1, 0.0) == 0.0);
    CHECK(eval_psi(2, 0.0) == doctest::Approx(-0.5311259661).epsilon(1e-10));
    const Eigen::VectorXd b = eval_psi_batch(3, 0.0);
    REQUIRE(b.size() == 4);
    CHECK(b(0) == doctest::Approx(0.75113).epsilon(1e-4));
    CHECK(b(1) == 0.0);
    CHECK(b(2) == doctest::Approx(-0.53113).epsilon(1e-4));
    CHECK(b(3) == 0.0);
    const Eigen::VectorXd one = eval_psi_batch(1, 0.0);
    CHECK(one(0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)));
    CHECK(one(1) == 0.0);
  }

  TEST_CASE("batch matches the 50-digit oracle") {
    const Eigen::VectorXd b = eval_psi_batch(30, 1.7);
    const auto ref = psi_oracle(30, BigFloat("1.7"));
    for (int k = 0; k <= 30; ++k) {
      const double r = ref[k].convert_to<double>();
      CHECK(std::abs(b(k) - r) <= 1e-12 * std::abs(r));
    }
  }

  TEST_CASE("oracle agreement across the oscillatory region") {
    for (double x : {-9.5, -3.25, 0.1, 2.0, 6.75, 11.0}) {
      const auto ref = psi_oracle(80, BigFloat(x));
      const Eigen::VectorXd b = eval_psi_batch(80, x);
      double scale = 0.0;
      for (int k = 0; k <= 80; ++k) scale = std::max(scale, std::abs(ref[k].convert_to<double>()));
      for (int k = 0; k <= 80; ++k) CHECK(std::abs(b(k) - ref[k].convert_to<double>()) <= 1e-12 * scale);
    }
  }

  TEST_CASE("exponent tracking far outside the oscillatory region") {
    const OscillatorEvaluator tracked(60);
    const OscillatorEvaluator direct(60, ScalingPolicy::direct);
    const double x = 45.0;
    CHECK(tracked.tracks_exponent(x));
    CHECK_FALSE(tracked.tracks_exponent(1.0));
    CHECK(direct(60, x) == 0.0);
    const auto ref = psi_oracle(60, BigFloat(45));
    for (int n : {0, 10, 60}) {
      const ScaledValue v = tracked.scaled(n, x);
      const double log_ref = log(abs(ref[n])).convert_to<double>();
      CHECK(v.log_abs() == doctest::Approx(log_ref).epsilon(1e-12));
      CHECK((v.mantissa > 0) == (ref[n] > 0));
    }
  }

  TEST_CASE("parity") {
    const OscillatorEvaluator ev(25);
    for (int n = 0; n <= 25; ++n) CHECK(ev(n, -1.3) == doctest::Approx((n % 2 ? -1 : 1) * ev(n, 1.3)).epsilon(1e-14));
  }

  TEST_CASE("top_values matches the full batch") {
    const OscillatorEvaluator ev(50);
    std::array<double, 4> top{};
    ev.top_values(50, 2.3, top);
    const Eigen::VectorXd b = ev.batch(2.3);
    for (int i = 0; i < 4; ++i) CHECK(top[i] == doctest::Approx(b(47 + i)).epsilon(1e-14));
    std::array<double, 3> low{};
    ev.top_values(1, 0.4, low);
    CHECK(low[0] == 0.0);
    CHECK(low[2] == doctest::Approx(b.size() ? eval_psi(1, 0.4) : 0.0));
  }

  TEST_CASE("derivative") {
    CHECK(eval_psi_derivative(0, 0.0) == doctest::Approx(0.0));
    CHECK(eval_psi_derivative(1, 0.0) == doctest::Approx(1.0622519).epsilon(1e-7));
    const double h = 1e-5;
    const double fd = (eval_psi(12, 0.9 + h) - eval_psi(12, 0.9 - h)) / (2 * h);
    CHECK(std::abs(eval_psi_derivative(12, 0.9) - fd) <= 1e-6);
  }

  TEST_CASE("Plancherel-Rotach asymptotics") {
    const OscillatorEvaluator ev(1000);
    double sup = 0.0;
    for (int i = -200; i <= 200; ++i) sup = std::max(sup, std::abs(ev(400, i * 0.1)));
    CHECK(std::abs(plancherel_rotach_bulk(400, 0, std::numbers::pi / 2) - ev(400, 0.0)) <= 0.02 * sup);

    const double y900 = std::sqrt(1800.0) * std::cos(1.0);
    const double exact = ev(900, y900);
    CHECK(std::abs(plancherel_rotach_bulk(900, 0, 1.0) - exact) <= 5e-2 * std::abs(exact));

    const double approx = plancherel_rotach_bulk(100, 1, std::numbers::pi / 3);
    CHECK(std::isfinite(approx));
    CHECK((approx > 0) == (ev(101, std::sqrt(200.0) * std::cos(std::numbers::pi / 3)) > 0));

    CHECK_THROWS_AS(plancherel_rotach_bulk(10, 0, 0.05), DomainError);
  }

  TEST_CASE("domain errors") {
    CHECK(eval_psi(-1, 0.3) == 0.0);  // psi_{-1} = 0 closes the recurrence
    CHECK_THROWS_AS(eval_psi(2, NAN), DomainError);
    CHECK_THROWS_AS(OscillatorEvaluator(-1), DomainError);
    const OscillatorEvaluator ev(5);
    CHECK_THROWS_AS(ev(6, 0.0), DomainError);
  }

  TEST_CASE("orthonormality by 200-node Gauss-Hermite") {
    const auto rule = gauss_hermite(200);
    const OscillatorEvaluator ev(30);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(31, 31);
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
      const Eigen::VectorXd p = ev.batch(rule.nodes(k));
      gram += rule.weights(k) * p * p.transpose();
    }
    CHECK((gram - Eigen::MatrixXd::Identity(31, 31)).cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("parity up to n = 200") {
    const OscillatorEvaluator ev(200);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-25.0, 25.0);
    for (int t = 0; t < 40; ++t) {
      const double x = u(rng);
      const Eigen::VectorXd a = ev.batch(x), b = ev.batch(-x);
      for (int n = 0; n <= 200; ++n) {
        const double expect = (n % 2 ? -1.0 : 1.0) * a(n);
        CHECK(std::abs(b(n) - expect) <= 1e-12 * std::abs(a(n)));
      }
    }
  }

  TEST_CASE("uniform bound N^(1/12) |psi_N| stays bounded") {
    std::vector<double> sups;
    for (int N : {16, 64, 256, 1024}) {
      const OscillatorEvaluator ev(N);
      const double edge = std::sqrt(2.0 * N) + 6.0;
      double sup = 0.0;
      for (int i = 0; i <= 20000; ++i) sup = std::max(sup, std::abs(ev(N, -edge + i * 2.0 * edge / 20000)));
      sups.push_back(std::pow(N, 1.0 / 12.0) * sup);
    }
    for (std::size_t i = 0; i < sups.size(); ++i) {
      CHECK(sups[i] <= 1.2);
      if (i > 0) CHECK(sups[i] <= 1.1 * sups[i - 1]);
    }
  }

  TEST_CASE("exponent tracking agrees with direct evaluation") {
    const OscillatorEvaluator tracked(120), direct(120, ScalingPolicy::direct);
    for (double x : {-35.0, -20.0, -15.7, 0.3, 16.0, 22.5, 33.0}) {
      const Eigen::VectorXd a = tracked.batch(x), b = direct.batch(x);
      for (int n = 0; n <= 120; ++n) {
        if (std::abs(b(n)) < 1e-290) continue;  // direct mode has underflowed
        CHECK(std::abs(a(n) - b(n)) <= 1e-12 * std::abs(b(n)));
      }
    }
  }
}
