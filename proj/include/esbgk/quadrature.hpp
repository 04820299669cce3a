#pragma once

#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace esbgk {

/// Raised when an adaptive rule cannot reach its requested accuracy.
class QuadratureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// Globally adaptive 15-point Gauss–Kronrod quadrature on [lo, hi].
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below rel_tol * |value| (or abs_tol).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                    double hi, double rel_tol = 1e-13,
                                    double abs_tol = 0.0, int max_intervals = 4000);

/// Nodes and weights of the n-point generalized Gauss–Laguerre rule,
///   ∫_0^∞ g(s) s^alpha e^{-s} ds ≈ Σ_k weight_k g(node_k).
/// `log_scaled_weights` holds log(weight_k) + node_k, i.e. the rule for
/// ∫_0^∞ h(s) s^alpha ds ≈ Σ exp(log_scaled_k) h(s_k) without the e^{-s}
/// factor (those weights overflow nothing but underflow when split).
struct GaussLaguerreRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
  Eigen::ArrayXd log_scaled_weights;
};

GaussLaguerreRule gauss_laguerre(int n, double alpha);

}  // namespace esbgk
