#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "esbgk/linearized.hpp"
#include "esbgk/params.hpp"
#include "esbgk/phase_grid.hpp"

namespace esbgk {

/// Macroscopic coefficient fields of f, one entry per spatial cell.
///
/// Coordinates of f on the orthonormalised macro basis (P_p for θ > 0, P_m for θ = 0).
/// θ > 0: a on √m, b_i on v_i√m, c on the combined energy mode.
/// θ = 0: c on the translational mode (|v|²-3)/√6 √m and d on the internal mode
/// (2I^{2/δ}-δ)/√(2δ) √m. `d` is empty for θ > 0.
struct MacroCoeffs {
  ArrayXd a;
  Eigen::Matrix<double, Eigen::Dynamic, 3> b;
  ArrayXd c;
  ArrayXd d;

  bool split_energy() const { return d.size() > 0; }
  /// ã = a - 3/√6 c and c̃ = c/√6 (θ = 0 system).
  ArrayXd tilde_a() const { return a - 3.0 / std::sqrt(6.0) * c; }
  ArrayXd tilde_c() const { return c / std::sqrt(6.0); }
};

MacroCoeffs extract_coeffs(const ProjectionBasis& basis, const ModelParams& params,
                           const ScalarField& f);

/// The macro projection that governs the dissipation for these params.
inline Projection macro_projection(const ModelParams& params) {
  return params.theta() > 0.0 ? Projection::polyatomic : Projection::monatomic;
}

/// k-th periodic central difference of f in x (k = 0, 1, 2).
ScalarField x_derivative(const PhaseGrid& grid, const ScalarField& f, int order);

/// Σ_{k≤N} ‖∂_x^k f‖²_{L²_{x,v,I}}.
double instantaneous_energy(const PhaseGrid& grid, const ScalarField& f, int max_order);
/// Same quantity for f = (F - m)/√m, evaluated cell by cell without storing f.
double perturbation_energy(const PhaseGrid& grid, const ScalarField& F, const ArrayXd& m,
                           int max_order);

/// R = Σ_{k≤N}‖P ∂^k f‖² / Σ_{k≤N}‖(I-P)∂^k f‖² with P from `macro_projection`.
/// +inf when only the denominator is below `floor`; NaN when both are.
double control_ratio(const ProjectionBasis& basis, const ModelParams& params, const ScalarField& f,
                     int max_order, double floor = 1e-14);

/// ℰ(t) = ½ Σ‖∂^α f(t)‖² + ∫_0^t Σ‖∂^α f(s)‖² ds, time integral by the trapezoid rule.
class EnergyFunctional {
public:
  /// Records a sample of Σ‖∂^α f‖² at time t (t nondecreasing) and returns ℰ(t).
  double add(double t, double instantaneous);
  double value() const { return value_; }

private:
  bool started_ = false;
  double last_t_ = 0.0, last_inst_ = 0.0, integral_ = 0.0, value_ = 0.0;
};

std::vector<double> energy_functional(const PhaseGrid& grid, const std::vector<double>& times,
                                      const std::vector<ScalarField>& trajectory, int max_order);

}  // namespace esbgk
