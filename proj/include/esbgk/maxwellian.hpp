#pragma once

#include <stdexcept>

#include "esbgk/moments.hpp"
#include "esbgk/phase_grid.hpp"

namespace esbgk {

/// Newton moment matching did not converge.
class MomentMatchError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Density of product form G(v) H(I) on one cell; node value = velocity(iv) * energy(ii).
struct SeparableDensity {
  ArrayXd velocity;  // Nv³
  ArrayXd energy;    // ni

  ArrayXd expand(const PhaseGrid& grid) const;
};

/// The five collision invariants ∫F (1, v, |v|²/2 + I^{2/δ}) dv dI of one cell.
struct MomentTarget {
  double mass = 0.0;
  Vector3d momentum = Vector3d::Zero();
  double energy = 0.0;
};

MomentTarget collision_invariants(const PhaseGrid& grid, const Eigen::Ref<const ArrayXd>& cell);
MomentTarget collision_invariants(const PhaseGrid& grid, const SeparableDensity& density);

/// Polyatomic ellipsoidal Maxwellian
///   ρ Λ_δ / (√det(2π𝒯) T_θ^{δ/2}) exp(-½(v-U)ᵀ𝒯⁻¹(v-U) - I^{2/δ}/T_θ).
/// Throws PhysicalStateError unless 𝒯 is SPD and T_θ > 0.
SeparableDensity ellipsoidal_maxwellian(const PhaseGrid& grid, const ModelParams& params,
                                        const MacroState& state);

struct MatchedMaxwellian {
  SeparableDensity density;
  double a = 0.0;
  Vector3d b = Vector3d::Zero();
  double c = 0.0;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Exponential tilt Mraw·exp(a + b·v + c(|v|²/2 + I^{2/δ})) whose discrete
/// collision invariants equal `target`. Newton on (a, b, c); converged when the
/// scaled residual is at most `tolerance`.
MatchedMaxwellian moment_match(const PhaseGrid& grid, const SeparableDensity& raw,
                               const MomentTarget& target, double tolerance = 1e-13,
                               int max_iterations = 50);

/// Σ w F ln F over one cell, with 0 ln 0 = 0. Throws on negative entries.
double h_functional(const PhaseGrid& grid, const Eigen::Ref<const ArrayXd>& cell);
/// Spatially integrated H: Σ_x dx Σ w F ln F.
double h_functional(const PhaseGrid& grid, const ScalarField& field);

}  // namespace esbgk
