#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "esbgk/params.hpp"
#include "esbgk/phase_grid.hpp"

namespace esbgk {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Projection {
  polyatomic,    // P_p: mass, momentum, combined energy
  monatomic,     // P_m: mass, momentum, translational and internal energy split
  diagonal,      // P_1: traceless diagonal second moments
  off_diagonal,  // P_2: v_i v_j, i < j
};

inline constexpr std::array<Projection, 4> kAllProjections = {
    Projection::polyatomic, Projection::monatomic, Projection::diagonal, Projection::off_diagonal};

const char* to_string(Projection which);

/// Discretely orthonormal bases for the four projections, built on one grid.
///
/// Each raw set is orthonormalised against the discrete inner product:
/// symmetrically (Löwdin) when its Gram matrix is nonsingular, canonically
/// (dropping null directions) otherwise. The P_1 set {c_1, c_2, c_3} always
/// takes the canonical path since c_1 + c_2 + c_3 = 0.
class ProjectionBasis {
public:
  explicit ProjectionBasis(const PhaseGrid& grid);

  const PhaseGrid& grid() const { return *grid_; }
  const ArrayXd& maxwellian() const { return m_; }
  const ArrayXd& sqrt_maxwellian() const { return sqrt_m_; }

  /// Orthonormal columns spanning the range of `which`.
  const MatrixXd& columns(Projection which) const { return q_[index(which)]; }

  /// ⟨f, q_k⟩ for each orthonormal column.
  VectorXd coefficients(Projection which, const Eigen::Ref<const ArrayXd>& f) const;
  ArrayXd project(Projection which, const Eigen::Ref<const ArrayXd>& f) const;

  /// Raw (un-orthonormalised) weights.
  ArrayXd combined_energy_mode() const;       // ((|v|²-3)+(2I^{2/δ}-δ))/√(2(3+δ)) √m
  ArrayXd translational_energy_mode() const;  // (|v|²-3)/√6 √m
  ArrayXd internal_energy_mode() const;       // (2I^{2/δ}-δ)/√(2δ) √m
  ArrayXd diagonal_mode(int i) const;         // (3v_i²-|v|²)/(3√2) √m
  ArrayXd off_diagonal_mode(int i, int j) const;
  ArrayXd velocity_mode(int i) const;         // v_i √m

  /// A velocity-only polynomial p(v) times q(I) times √m, tabulated per node.
  template <typename VelocityFn, typename EnergyFn>
  ArrayXd tabulate(VelocityFn&& pv, EnergyFn&& qs) const {
    const PhaseGrid& g = *grid_;
    ArrayXd out(g.nodes_per_cell());
    for (int iv = 0; iv < g.velocity_count(); ++iv) {
      const double pvv = pv(g.v1(iv), g.v2(iv), g.v3(iv));
      for (int k = 0; k < g.ni; ++k) {
        const Eigen::Index n = Eigen::Index(iv) * g.ni + k;
        out(n) = pvv * qs(g.s(k)) * sqrt_m_(n);
      }
    }
    return out;
  }

  double norm(const Eigen::Ref<const ArrayXd>& f) const;
  double dot(const Eigen::Ref<const ArrayXd>& a, const Eigen::Ref<const ArrayXd>& b) const;

private:
  static int index(Projection which) { return static_cast<int>(which); }

  const PhaseGrid* grid_;
  ArrayXd m_, sqrt_m_;
  std::array<MatrixXd, 4> q_;
};

/// Orthonormalise the columns of `raw` in the weighted inner product Σ w a b.
/// Null directions of the Gram matrix (relative eigenvalue below
/// `rank_tolerance`) are dropped.
MatrixXd orthonormalize(const MatrixXd& raw, const ArrayXd& weight, double rank_tolerance = 1e-10);

/// f = (F - m)/√m cellwise, and its inverse.
ScalarField to_perturbation(const PhaseGrid& grid, const ScalarField& F);
ScalarField from_perturbation(const PhaseGrid& grid, const ScalarField& f);

/// f together with its four projections, shared by every (ν, θ).
struct ProjectedParts {
  ArrayXd f, pp, pm, p1, p2;
};

ProjectedParts decompose(const ProjectionBasis& basis, const Eigen::Ref<const ArrayXd>& f);

/// P_{ν,θ} f = θ P_p f + (1-θ){P_m f + ν(P_1 + P_2) f}.
ArrayXd relaxation_projection(const ModelParams& params, const ProjectedParts& parts);

/// L_{ν,θ} f = (P_{ν,θ} f - f)/(1 - ν + θν).
ArrayXd apply_L(const ModelParams& params, const ProjectedParts& parts);
ArrayXd apply_L(const ProjectionBasis& basis, const ModelParams& params,
                const Eigen::Ref<const ArrayXd>& f);

/// lhs = -(1-ν+θν)⟨Lf, f⟩, A = ‖(I-P_p)f‖², B = ‖(I-P_m)f‖² - ν‖(P_1+P_2)f‖².
struct DissipationTerms {
  double lhs = 0.0;
  double A = 0.0;
  double B = 0.0;
};

DissipationTerms dissipation_terms(const ProjectionBasis& basis, const ModelParams& params,
                                   const ProjectedParts& parts);
DissipationTerms dissipation_terms(const ProjectionBasis& basis, const ModelParams& params,
                                   const Eigen::Ref<const ArrayXd>& f);

/// θ > 0: lhs - θ‖(I-P_p)f‖²;  θ = 0: lhs - (1-|ν|)‖(I-P_m)f‖².
double coercivity_margin(const ProjectionBasis& basis, const ModelParams& params,
                         const ProjectedParts& parts);
double coercivity_margin(const ProjectionBasis& basis, const ModelParams& params,
                         const Eigen::Ref<const ArrayXd>& f);

/// Span{1, v_i, v_i², v_iv_j, I^{2/δ}}·√m, orthonormalised (11 columns).
MatrixXd moment_subspace(const ProjectionBasis& basis);

struct KernelReport {
  int dimension = 0;
  VectorXd singular_values;  // descending
};

/// Numerical kernel dimension of L restricted to the 11-mode subspace.
KernelReport kernel_dimension(const ProjectionBasis& basis, const ModelParams& params,
                              double zero_tolerance = 1e-10);

/// ‖L e‖ for e = (|v|²-3)/√6 √m, the translational/internal split mode.
double split_mode_response(const ProjectionBasis& basis, const ModelParams& params);
/// Continuum value θ/(1-ν+θν) √(δ/(3+δ)).
double split_mode_response_exact(const ModelParams& params);

struct LinearizationOrder {
  std::vector<double> eps;
  std::vector<double> maxwellian_residual;  // r(ε)
  std::vector<double> frequency_residual;   // s(ε)
  std::vector<bool> excluded;               // below the quadrature floor
  double maxwellian_slope = 0.0;
  double frequency_slope = 0.0;
};

/// Residuals of the first-order expansions of M_{ν,θ}(m + ε√m f) and A_{ν,θ}
/// and the least-squares log-log slope of each against ε.
LinearizationOrder linearization_residual(const ProjectionBasis& basis, const ModelParams& params,
                                          const Eigen::Ref<const ArrayXd>& f,
                                          const std::vector<double>& eps_list,
                                          double floor = 1e-13);

/// Smooth random perturbation √m·Σ c_k exp(-|v-μ_k|²/2σ_k² - (s-τ_k)²/2ς_k²),
/// normalised to unit discrete norm.
ArrayXd smooth_random_field(const ProjectionBasis& basis, std::mt19937_64& rng, int bumps = 4);

/// Subtract from every cell the x-average of the P-span components of f,
/// so the global integrals against the range of `which` vanish.
void make_admissible(const ProjectionBasis& basis, Projection which, ScalarField& f);

}  // namespace esbgk
