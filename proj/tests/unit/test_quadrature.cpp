#include <doctest.h>

#include <cmath>
#include <numbers>

#include "esbgk/quadrature.hpp"
#include "esbgk/sym3.hpp"
#include "oracles.hpp"

using namespace esbgk;

TEST_CASE("adaptive Gauss-Kronrod on smooth and endpoint-singular integrands") {
  CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  // ∫_0^1 x^{-1/2} dx = 2
  const auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(r.value - 2.0) < 1e-10);
  CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-13, 0.0, 50),
                  QuadratureError);
}

TEST_CASE("generalized Gauss-Laguerre reproduces Gamma moments") {
  for (double alpha : {-0.5, 0.0, 0.5, 1.5}) {
    const int n = 16;
    const GaussLaguerreRule rule = gauss_laguerre(n, alpha);
    CHECK((rule.nodes.tail(n - 1) > rule.nodes.head(n - 1)).all());
    for (int k = 0; k <= 2 * n - 1; k += 3) {
      const double exact = std::tgamma(alpha + k + 1.0);
      const double sum = (rule.weights * rule.nodes.pow(k)).sum();
      CHECK(std::abs(sum - exact) <= 1e-11 * exact);
    }
    CHECK((rule.log_scaled_weights - (rule.weights.log() + rule.nodes)).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("Gauss-Laguerre at 32 nodes integrates s^alpha without the weight") {
  const GaussLaguerreRule rule = gauss_laguerre(32, 0.0);
  // ∫_0^∞ e^{-s/2} ds = 2 via the log-scaled weights
  const double sum = (rule.log_scaled_weights.exp() * (-0.5 * rule.nodes).exp()).sum();
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS(gauss_laguerre(0, 0.0));
}

TEST_CASE("closed-form symmetric 3x3 eigenvalues against the dense solver") {
  Eigen::Matrix3d a;
  a << 2.0, 0.3, -0.1, 0.3, 1.0, 0.2, -0.1, 0.2, 0.5;
  const Eigen::Vector3d ev = sym3_eigenvalues<double>(a);
  CHECK((ev - oracle::eigenvalues(a)).cwiseAbs().maxCoeff() < 1e-14);

  // near-triple spectrum takes the Jacobi path
  Eigen::Matrix3d b = Eigen::Matrix3d::Identity();
  b(0, 1) = b(1, 0) = 1e-9;
  CHECK((sym3_eigenvalues<double>(b) - oracle::eigenvalues(b)).cwiseAbs().maxCoeff() < 1e-15);

  const Eigen::Matrix3d d = Eigen::Vector3d(1.5, 0.75, 0.75).asDiagonal();
  CHECK(sym3_eigenvalues<double>(d)(0) == 0.75);
  CHECK((spd3_inverse<double>(a) * a - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("templated eigenvalues in long double") {
  Eigen::Matrix<long double, 3, 3> a;
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const auto ev = sym3_eigenvalues<long double>(a);
  CHECK(std::abs(double(ev.sum()) - 9.0) < 1e-15);
  CHECK(std::abs(double(ev(0) * ev(1) * ev(2)) - double(a.determinant())) < 1e-13);
}
