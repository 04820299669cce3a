#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "esbgk/params.hpp"
#include "esbgk/phase_grid.hpp"

namespace esbgk {

using Eigen::Matrix3d;
using Eigen::Vector3d;

/// A field that is not a physical gas state (ρ ≤ 0, 𝒯 not SPD, non-finite).
class PhysicalStateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Macroscopic fields of one spatial cell.
struct MacroState {
  double rho = 0.0;
  Vector3d U = Vector3d::Zero();
  Matrix3d Theta = Matrix3d::Zero();  // stress tensor
  double E = 0.0, E_kin = 0.0, E_tr = 0.0, E_I = 0.0;
  double T_delta = 0.0, T_tr = 0.0, T_I = 0.0, T_theta = 0.0;
  Matrix3d tensor_T = Matrix3d::Zero();  // corrected temperature tensor 𝒯_{ν,θ}
  double collision_frequency = 0.0;     // A_{ν,θ} = ρ T_δ / (1 - ν + θν)
};

/// Macroscopic state from raw moments (ρ, ρU, ∫v⊗v F, E_I).
MacroState macro_state_from_moments(const ModelParams& params, double rho, const Vector3d& momentum,
                                    const Matrix3d& second_moment, double internal_energy);

/// Throws PhysicalStateError when ρ ≤ 0.
MacroState compute_moments(const PhaseGrid& grid, const ModelParams& params,
                           const Eigen::Ref<const ArrayXd>& cell);

/// Smallest eigenvalue of 𝒯_{ν,θ}; throws PhysicalStateError on non-finite entries.
double check_tensor_spd(const MacroState& state);

}  // namespace esbgk
