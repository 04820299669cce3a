#pragma once

#include <stdexcept>
#include <string>

namespace esbgk {

/// Relaxation parameters (nu, theta) and internal degrees of freedom delta.
class ModelParams {
public:
  ModelParams(double nu, double theta, double delta) : nu_(nu), theta_(theta), delta_(delta) {
    if (!(nu > -0.5 && nu < 1.0))
      throw std::invalid_argument("nu must lie in (-1/2, 1), got " + std::to_string(nu));
    if (!(theta >= 0.0 && theta <= 1.0))
      throw std::invalid_argument("theta must lie in [0, 1], got " + std::to_string(theta));
    if (!(delta > 0.0))
      throw std::invalid_argument("delta must be positive, got " + std::to_string(delta));
  }

  double nu() const { return nu_; }
  double theta() const { return theta_; }
  double delta() const { return delta_; }

  /// 1 - nu + theta nu, the denominator of the collision frequency.
  double frequency_denominator() const { return 1.0 - nu_ + theta_ * nu_; }

private:
  double nu_;
  double theta_;
  double delta_;
};

}  // namespace esbgk
