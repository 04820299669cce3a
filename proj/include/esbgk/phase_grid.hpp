#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "esbgk/params.hpp"

namespace esbgk {

using Eigen::ArrayXd;

class GridError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent used for the tail criterion: exp(-27.6) ≈ 1e-12.
inline constexpr double kTailExponent = 27.6;

struct GridSpec {
  int nx = 32;
  int nv = 24;
  int ni = 32;
  std::optional<double> v_max;  // auto: 8
  std::optional<double> i_max;  // auto: 27.6^{delta/2}
  double length = 6.283185307179586;
};

/// Discrete phase space T¹ x R³ x R⁺.
///
/// x: Nx cell centres on the periodic interval [0, length).
/// v: Nv uniform nodes per axis on [-v_max, v_max] with trapezoid weights,
///    tensored to Nv³ nodes (flattened as i1*Nv² + i2*Nv + i3).
/// I: generalized Gauss–Laguerre nodes in s = I^{2/delta}, mapped back to I.
///    `i_max` is the coverage cutoff; the largest node must reach it.
///
/// Phase-space node n = iv * ni + ii, internal energy fastest.
struct PhaseGrid {
  int nx = 0, nv = 0, ni = 0;
  double length = 0.0, dx = 0.0;
  double v_max = 0.0, i_max = 0.0;
  double delta = 0.0;

  ArrayXd x;          // nx cell centres
  ArrayXd v_axis;     // nv per-axis nodes
  ArrayXd w_axis;     // nv per-axis trapezoid weights

  ArrayXd v1, v2, v3, v_sq, w_v;  // Nv³ velocity nodes and product weights
  ArrayXd energy_nodes;           // ni values of I
  ArrayXd s;                      // ni values of I^{2/delta}
  ArrayXd w_i;                    // ni internal-energy weights

  ArrayXd weight;  // Nv³·ni combined weights w_v * w_i

  int velocity_count() const { return nv * nv * nv; }
  int nodes_per_cell() const { return velocity_count() * ni; }
  Eigen::Index field_size() const { return Eigen::Index(nx) * nodes_per_cell(); }
};

PhaseGrid build_grid(const ModelParams& params, const GridSpec& spec);

/// Λ_δ = 1 / ∫_0^∞ exp(-I^{2/δ}) dI by adaptive quadrature.
double lambda_delta(double delta);

/// Default internal-energy cutoff 27.6^{δ/2}.
double auto_i_max(double delta);

/// Σ w_v w_I a b over one spatial cell.
template <typename A, typename B>
double inner_product(const PhaseGrid& grid, const Eigen::ArrayBase<A>& a, const Eigen::ArrayBase<B>& b) {
  return (grid.weight * a.derived() * b.derived()).sum();
}

/// Global Maxwellian m(v, I) = Λ_δ (2π)^{-3/2} exp(-|v|²/2 - I^{2/δ}).
ArrayXd global_maxwellian(const PhaseGrid& grid);

/// Distribution values F(x, v, I), one contiguous slice per spatial cell.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(const PhaseGrid& grid, double value = 0.0)
      : nx_(grid.nx), per_cell_(grid.nodes_per_cell()),
        data_(ArrayXd::Constant(grid.field_size(), value)) {}

  /// Every cell set to `slice`.
  static ScalarField uniform(const PhaseGrid& grid, const ArrayXd& slice);

  int nx() const { return nx_; }
  int nodes_per_cell() const { return per_cell_; }

  auto cell(int ix) { return data_.segment(Eigen::Index(ix) * per_cell_, per_cell_); }
  auto cell(int ix) const { return data_.segment(Eigen::Index(ix) * per_cell_, per_cell_); }

  ArrayXd& values() { return data_; }
  const ArrayXd& values() const { return data_; }

  bool matches(const PhaseGrid& grid) const {
    return nx_ == grid.nx && per_cell_ == grid.nodes_per_cell();
  }

private:
  int nx_ = 0;
  int per_cell_ = 0;
  ArrayXd data_;
};

}  // namespace esbgk
