#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "esbgk/config.hpp"
#include "esbgk/linearized.hpp"
#include "esbgk/solver.hpp"

namespace esbgk {

/// One row of a verification report. A check passes iff worst_margin ≥ -tolerance;
/// margins are signed so that negative values are violations.
struct CheckResult {
  std::string check;
  long samples = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

void write_report(std::ostream& out, const std::vector<CheckResult>& checks);

/// Product density ρ/√det(2πΘ) exp(-½(v-U)ᵀΘ⁻¹(v-U)) · Λ_δ/T_I^{δ/2} exp(-I^{2/δ}/T_I).
ArrayXd gaussian_state(const PhaseGrid& grid, double rho, const Vector3d& U, const Matrix3d& Theta,
                       double T_I);

/// F₀ for the configured initial condition. Perturbation data is
/// m + ε√m Σ_k q_k cos(2πkx/L + φ_k) with admissibility imposed through
/// the macro projection of `params`.
ScalarField initial_field(const ProjectionBasis& basis, const ModelParams& params,
                          const InitialSpec& spec);

/// Relative drift |q(t) - q(0)| / max(|q(0)|, mass(0)) of the five invariants, worst over rows.
double invariant_drift(const Diagnostics& diagnostics);

/// Linear-theory check suite on one cell of `grid` with fields drawn from `seed`.
std::vector<CheckResult> linear_checks(const ProjectionBasis& basis, const ModelParams& params,
                                       const ExperimentSpec& spec);

struct DichotomyRow {
  double theta = 0.0;
  int kernel_dim = 0;
  double split_norm = 0.0;
  double worst_margin = 0.0;
};

std::vector<DichotomyRow> dichotomy_sweep(const ProjectionBasis& basis, double nu,
                                          const ExperimentSpec& spec);

struct DecayFit {
  double lambda = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
  bool truncated = false;  // norm hit the floor inside the window; fit over the resolved prefix
};

/// Least-squares fit of log y = c - λt over samples with t ≥ skip·t_last and y above `floor`.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double skip = 0.1,
                   double floor = 1e-28);

/// CLI entry points. Return the process exit status; every nonzero status
/// writes failure.json into `out_dir`.
int cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir);
int cmd_verify_linear(const RunConfig& config, const std::filesystem::path& out_dir);
int cmd_dichotomy_sweep(const RunConfig& config, const std::filesystem::path& out_dir);
int cmd_decay(const RunConfig& config, const std::filesystem::path& out_dir);

/// failure.json: {"command", "status", "reason", ...}.
void write_failure(const std::filesystem::path& out_dir, const std::string& command, int status,
                   const std::string& reason, const std::vector<CheckResult>& failed = {});

}  // namespace esbgk
