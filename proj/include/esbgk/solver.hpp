#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esbgk/maxwellian.hpp"
#include "esbgk/moments.hpp"
#include "esbgk/params.hpp"
#include "esbgk/phase_grid.hpp"

namespace esbgk {

class CflError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class Limiter { none, minmod, vanleer };
enum class Splitting { lie = 1, strang = 2 };

/// How the relaxation substep integrates dF/dt = κ(M̃ - F) with κ and M̃
/// frozen at the start of the step.
///   implicit:    F' = (F + Δtκ M̃)/(1 + Δtκ)
///   exponential: F' = e^{-κΔt} F + (1 - e^{-κΔt}) M̃
/// Both are convex combinations of F and M̃.
enum class RelaxationScheme { exponential, implicit };

struct SolverConfig {
  double cfl = 0.9;
  double t_end = 1.0;
  int steps = 0;  // 0: CFL-limited step
  int output_every = 1;
  Splitting splitting = Splitting::strang;
  Limiter limiter = Limiter::minmod;
  RelaxationScheme relaxation = RelaxationScheme::exponential;
  int energy_order = 2;  // derivative order N of the energy functional

  void validate() const;
};

/// Time step used by `run`: min(cfl·dx/v_max, t_end/steps), shrunk so that
/// an integer number of equal steps reaches t_end.
struct StepPlan {
  double dt = 0.0;
  int steps = 0;
};
StepPlan plan_steps(const PhaseGrid& grid, const SolverConfig& config);

struct DiagnosticsRow {
  double t = 0.0;
  double mass = 0.0;
  Vector3d momentum = Vector3d::Zero();
  double energy = 0.0;
  double H = 0.0;
  double energy_norm = 0.0;  // ℰ(t)
  double min_f = 0.0;
  double lambda_min = 0.0;   // smallest eigenvalue of 𝒯 over cells
};

struct Diagnostics {
  std::vector<DiagnosticsRow> rows;

  static constexpr const char* kHeader = "t,mass,mom1,mom2,mom3,energy,H,Enorm,minF,lamMin";
  void write_csv(std::ostream& out) const;
};

/// Global invariants Σ_x dx ∫F(1, v, |v|²/2 + I^{2/δ}).
MomentTarget total_invariants(const PhaseGrid& grid, const ScalarField& F);

/// Upwind finite-volume transport v₁∂ₓF over one step on the periodic mesh.
/// Flux-limited second order with minmod/vanleer; first order with none.
/// Throws CflError when v_max·dt/dx exceeds `cfl_limit`.
void transport_step(const PhaseGrid& grid, ScalarField& F, double dt, Limiter limiter,
                    double cfl_limit = 0.9);

struct RelaxationReport {
  double min_lambda = 0.0;   // smallest eigenvalue of 𝒯 seen
  double min_T_theta = 0.0;
};

/// Relaxation toward the moment-matched ellipsoidal Maxwellian in every cell.
RelaxationReport relaxation_step(const PhaseGrid& grid, const ModelParams& params, ScalarField& F,
                                 double dt, RelaxationScheme scheme = RelaxationScheme::exponential);

struct RunResult {
  ScalarField F;
  Diagnostics diagnostics;
  int steps_taken = 0;
  double dt = 0.0;
  std::optional<std::string> failure;  // set when a step aborted the run
};

/// Called at every output time with (step, t, F).
using OutputObserver = std::function<void(int, double, const ScalarField&)>;

/// Splitting integration to t_end. Step errors abort the run; the diagnostics
/// gathered so far are kept and `failure` carries the reason.
RunResult run(const PhaseGrid& grid, const ModelParams& params, const SolverConfig& config,
              ScalarField F0, const OutputObserver& observer = {});

}  // namespace esbgk
