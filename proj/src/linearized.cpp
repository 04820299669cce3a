#include "esbgk/linearized.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "esbgk/maxwellian.hpp"
#include "esbgk/moments.hpp"

namespace esbgk {

const char* to_string(Projection which) {
  switch (which) {
    case Projection::polyatomic: return "P_p";
    case Projection::monatomic: return "P_m";
    case Projection::diagonal: return "P_1";
    case Projection::off_diagonal: return "P_2";
  }
  return "?";
}

MatrixXd orthonormalize(const MatrixXd& raw, const ArrayXd& weight, double rank_tolerance) {
  const MatrixXd weighted = weight.matrix().asDiagonal() * raw;
  MatrixXd gram = raw.transpose() * weighted;
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
  const VectorXd lambda = eig.eigenvalues();
  const MatrixXd& vecs = eig.eigenvectors();
  const double cutoff = rank_tolerance * lambda.maxCoeff();
  const int kept = int((lambda.array() > cutoff).count());
  MatrixXd transform;
  if (kept == raw.cols()) {
    // Symmetric orthogonalisation: G^{-1/2}.
    transform = vecs * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();
  } else {
    transform.resize(raw.cols(), kept);
    for (int j = 0, k = 0; j < raw.cols(); ++j)
      if (lambda(j) > cutoff) transform.col(k++) = vecs.col(j) / std::sqrt(lambda(j));
  }
  return raw * transform;
}

ProjectionBasis::ProjectionBasis(const PhaseGrid& grid) : grid_(&grid) {
  m_ = global_maxwellian(grid);
  sqrt_m_ = m_.sqrt();
  const Eigen::Index n = grid.nodes_per_cell();
  auto build = [&](std::initializer_list<ArrayXd> cols) {
    MatrixXd raw(n, Eigen::Index(cols.size()));
    Eigen::Index j = 0;
    for (const ArrayXd& c : cols) raw.col(j++) = c.matrix();
    return orthonormalize(raw, grid.weight);
  };
  q_[index(Projection::polyatomic)] = build(
      {sqrt_m_, velocity_mode(0), velocity_mode(1), velocity_mode(2), combined_energy_mode()});
  q_[index(Projection::monatomic)] =
      build({sqrt_m_, velocity_mode(0), velocity_mode(1), velocity_mode(2),
             translational_energy_mode(), internal_energy_mode()});
  q_[index(Projection::diagonal)] = build({diagonal_mode(0), diagonal_mode(1), diagonal_mode(2)});
  q_[index(Projection::off_diagonal)] =
      build({off_diagonal_mode(0, 1), off_diagonal_mode(1, 2), off_diagonal_mode(2, 0)});
}

ArrayXd ProjectionBasis::combined_energy_mode() const {
  const double d = grid_->delta;
  const double norm = 1.0 / std::sqrt(2.0 * (3.0 + d));
  return tabulate([](double a, double b, double c) { return a * a + b * b + c * c - 3.0; },
                  [](double) { return 1.0; }) * norm +
         tabulate([](double, double, double) { return 1.0; },
                  [d](double s) { return 2.0 * s - d; }) * norm;
}

ArrayXd ProjectionBasis::translational_energy_mode() const {
  return tabulate(
      [](double a, double b, double c) { return (a * a + b * b + c * c - 3.0) / std::sqrt(6.0); },
      [](double) { return 1.0; });
}

ArrayXd ProjectionBasis::internal_energy_mode() const {
  const double d = grid_->delta;
  return tabulate([](double, double, double) { return 1.0; },
                  [d](double s) { return (2.0 * s - d) / std::sqrt(2.0 * d); });
}

ArrayXd ProjectionBasis::diagonal_mode(int i) const {
  return tabulate(
      [i](double a, double b, double c) {
        const double v[3] = {a, b, c};
        return (3.0 * v[i] * v[i] - (a * a + b * b + c * c)) / (3.0 * std::sqrt(2.0));
      },
      [](double) { return 1.0; });
}

ArrayXd ProjectionBasis::off_diagonal_mode(int i, int j) const {
  return tabulate(
      [i, j](double a, double b, double c) {
        const double v[3] = {a, b, c};
        return v[i] * v[j];
      },
      [](double) { return 1.0; });
}

ArrayXd ProjectionBasis::velocity_mode(int i) const {
  return tabulate(
      [i](double a, double b, double c) {
        const double v[3] = {a, b, c};
        return v[i];
      },
      [](double) { return 1.0; });
}

double ProjectionBasis::dot(const Eigen::Ref<const ArrayXd>& a,
                            const Eigen::Ref<const ArrayXd>& b) const {
  return (grid_->weight * a * b).sum();
}

double ProjectionBasis::norm(const Eigen::Ref<const ArrayXd>& f) const {
  return std::sqrt(dot(f, f));
}

VectorXd ProjectionBasis::coefficients(Projection which, const Eigen::Ref<const ArrayXd>& f) const {
  const VectorXd weighted = (grid_->weight * f).matrix();
  return columns(which).transpose() * weighted;
}

ArrayXd ProjectionBasis::project(Projection which, const Eigen::Ref<const ArrayXd>& f) const {
  return (columns(which) * coefficients(which, f)).array();
}

ScalarField to_perturbation(const PhaseGrid& grid, const ScalarField& F) {
  const ArrayXd m = global_maxwellian(grid);
  const ArrayXd inv_sqrt = m.sqrt().inverse();
  ScalarField f(grid);
  for (int ix = 0; ix < grid.nx; ++ix) f.cell(ix) = (F.cell(ix) - m) * inv_sqrt;
  return f;
}

ScalarField from_perturbation(const PhaseGrid& grid, const ScalarField& f) {
  const ArrayXd m = global_maxwellian(grid);
  const ArrayXd sqrt_m = m.sqrt();
  ScalarField F(grid);
  for (int ix = 0; ix < grid.nx; ++ix) F.cell(ix) = m + sqrt_m * f.cell(ix);
  return F;
}

ProjectedParts decompose(const ProjectionBasis& basis, const Eigen::Ref<const ArrayXd>& f) {
  return {f, basis.project(Projection::polyatomic, f), basis.project(Projection::monatomic, f),
          basis.project(Projection::diagonal, f), basis.project(Projection::off_diagonal, f)};
}

ArrayXd relaxation_projection(const ModelParams& params, const ProjectedParts& parts) {
  const double theta = params.theta();
  return theta * parts.pp + (1.0 - theta) * (parts.pm + params.nu() * (parts.p1 + parts.p2));
}

ArrayXd apply_L(const ModelParams& params, const ProjectedParts& parts) {
  return (relaxation_projection(params, parts) - parts.f) / params.frequency_denominator();
}

ArrayXd apply_L(const ProjectionBasis& basis, const ModelParams& params,
                const Eigen::Ref<const ArrayXd>& f) {
  return apply_L(params, decompose(basis, f));
}

DissipationTerms dissipation_terms(const ProjectionBasis& basis, const ModelParams& params,
                                   const ProjectedParts& parts) {
  DissipationTerms out;
  const ArrayXd lf = apply_L(params, parts);
  out.lhs = -params.frequency_denominator() * basis.dot(lf, parts.f);
  const ArrayXd micro_p = parts.f - parts.pp;
  const ArrayXd micro_m = parts.f - parts.pm;
  const ArrayXd shear = parts.p1 + parts.p2;
  out.A = basis.dot(micro_p, micro_p);
  out.B = basis.dot(micro_m, micro_m) - params.nu() * basis.dot(shear, shear);
  return out;
}

DissipationTerms dissipation_terms(const ProjectionBasis& basis, const ModelParams& params,
                                   const Eigen::Ref<const ArrayXd>& f) {
  return dissipation_terms(basis, params, decompose(basis, f));
}

double coercivity_margin(const ProjectionBasis& basis, const ModelParams& params,
                         const ProjectedParts& parts) {
  const DissipationTerms d = dissipation_terms(basis, params, parts);
  if (params.theta() > 0.0) return d.lhs - params.theta() * d.A;
  const ArrayXd micro_m = parts.f - parts.pm;
  return d.lhs - (1.0 - std::abs(params.nu())) * basis.dot(micro_m, micro_m);
}

double coercivity_margin(const ProjectionBasis& basis, const ModelParams& params,
                         const Eigen::Ref<const ArrayXd>& f) {
  return coercivity_margin(basis, params, decompose(basis, f));
}

MatrixXd moment_subspace(const ProjectionBasis& basis) {
  const Eigen::Index n = basis.grid().nodes_per_cell();
  MatrixXd raw(n, 11);
  auto one = [](double) { return 1.0; };
  raw.col(0) = basis.sqrt_maxwellian().matrix();
  for (int i = 0; i < 3; ++i) {
    raw.col(1 + i) = basis.velocity_mode(i).matrix();
    raw.col(4 + i) = basis
                         .tabulate(
                             [i](double a, double b, double c) {
                               const double v[3] = {a, b, c};
                               return v[i] * v[i];
                             },
                             one)
                         .matrix();
  }
  raw.col(7) = basis.off_diagonal_mode(0, 1).matrix();
  raw.col(8) = basis.off_diagonal_mode(1, 2).matrix();
  raw.col(9) = basis.off_diagonal_mode(2, 0).matrix();
  raw.col(10) =
      basis.tabulate([](double, double, double) { return 1.0; }, [](double s) { return s; }).matrix();
  return orthonormalize(raw, basis.grid().weight);
}

KernelReport kernel_dimension(const ProjectionBasis& basis, const ModelParams& params,
                              double zero_tolerance) {
  const MatrixXd q = moment_subspace(basis);
  const Eigen::Index k = q.cols();
  MatrixXd image(q.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j)
    image.col(j) = apply_L(basis, params, q.col(j).array()).matrix();
  const MatrixXd restricted = q.transpose() * (basis.grid().weight.matrix().asDiagonal() * image);
  Eigen::JacobiSVD<MatrixXd> svd(restricted);
  KernelReport report;
  report.singular_values = svd.singularValues();
  report.dimension = int((report.singular_values.array() < zero_tolerance).count());
  return report;
}

double split_mode_response(const ProjectionBasis& basis, const ModelParams& params) {
  return basis.norm(apply_L(basis, params, basis.translational_energy_mode()));
}

double split_mode_response_exact(const ModelParams& params) {
  const double d = params.delta();
  return params.theta() / params.frequency_denominator() * std::sqrt(d / (3.0 + d));
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<bool>& excluded) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (excluded[i]) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

LinearizationOrder linearization_residual(const ProjectionBasis& basis, const ModelParams& params,
                                          const Eigen::Ref<const ArrayXd>& f,
                                          const std::vector<double>& eps_list, double floor) {
  const PhaseGrid& grid = basis.grid();
  const ArrayXd& m = basis.maxwellian();
  const ArrayXd& sqrt_m = basis.sqrt_maxwellian();
  const ArrayXd pf = relaxation_projection(params, decompose(basis, f));

  // First-order coefficient of A_{ν,θ}(1-ν+θν): a_5..a_7 = 1/(3+δ), a_11 = δ/(3+δ),
  // the e_i carrying the (ν, θ) dependence of the expansion.
  const double d = params.delta(), nu = params.nu(), th = params.theta();
  double freq_linear = 0.0;
  for (int i = 0; i < 3; ++i) {
    // e_{5..7} = {θ(|v|² + 2I^{2/δ})/(3+δ) + (1-θ)((1-ν)|v|²/3 + ν v_i²)}√m
    const ArrayXd e_energy = basis.tabulate([](double, double, double) { return 1.0; },
                                            [&](double s) { return th * 2.0 * s / (3.0 + d); });
    const ArrayXd e_velocity = basis.tabulate(
        [&](double a, double b, double c) {
          const double v[3] = {a, b, c};
          const double v2 = a * a + b * b + c * c;
          return th * v2 / (3.0 + d) + (1.0 - th) * ((1.0 - nu) / 3.0 * v2 + nu * v[i] * v[i]);
        },
        [](double) { return 1.0; });
    freq_linear += basis.dot(f, e_velocity + e_energy) / (3.0 + d);
  }
  const ArrayXd e11 = basis.tabulate(
      [&](double a, double b, double c) { return th * (a * a + b * b + c * c) / (3.0 + d); },
      [](double) { return 1.0; }) +
                      basis.tabulate([](double, double, double) { return 1.0; },
                                     [&](double s) {
                                       return th * 2.0 * s / (3.0 + d) + (1.0 - th) * 2.0 / d * s;
                                     });
  freq_linear += d / (3.0 + d) * basis.dot(f, e11);

  LinearizationOrder out;
  out.eps = eps_list;
  for (double eps : eps_list) {
    const ArrayXd F = m + eps * sqrt_m * f;
    const MacroState st = compute_moments(grid, params, F);
    const ArrayXd M = ellipsoidal_maxwellian(grid, params, st).expand(grid);
    const ArrayXd g = (M - m) / sqrt_m - eps * pf;
    const double r = basis.norm(g);
    const double s =
        std::abs(st.collision_frequency * params.frequency_denominator() - 1.0 - eps * freq_linear);
    out.maxwellian_residual.push_back(r);
    out.frequency_residual.push_back(s);
    out.excluded.push_back(r < floor || s < floor);
  }
  out.maxwellian_slope = loglog_slope(out.eps, out.maxwellian_residual, out.excluded);
  out.frequency_slope = loglog_slope(out.eps, out.frequency_residual, out.excluded);
  return out;
}

ArrayXd smooth_random_field(const ProjectionBasis& basis, std::mt19937_64& rng, int bumps) {
  const PhaseGrid& g = basis.grid();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  ArrayXd q = ArrayXd::Zero(g.nodes_per_cell());
  for (int b = 0; b < bumps; ++b) {
    const double amp = between(-1.0, 1.0);
    const std::array<double, 3> centre{between(-1.5, 1.5), between(-1.5, 1.5), between(-1.5, 1.5)};
    const double sigma = between(0.6, 1.4);
    const double tau = between(0.0, g.delta + 2.0);
    const double spread = between(0.5, 2.0);
    q += amp * basis.tabulate(
                   [&](double a, double bb, double c) {
                     const double r2 = (a - centre[0]) * (a - centre[0]) +
                                       (bb - centre[1]) * (bb - centre[1]) +
                                       (c - centre[2]) * (c - centre[2]);
                     return std::exp(-0.5 * r2 / (sigma * sigma));
                   },
                   [&](double s) { return std::exp(-0.5 * (s - tau) * (s - tau) / (spread * spread)); });
  }
  return q / basis.norm(q);
}

void make_admissible(const ProjectionBasis& basis, Projection which, ScalarField& f) {
  const PhaseGrid& g = basis.grid();
  VectorXd mean = VectorXd::Zero(basis.columns(which).cols());
  for (int ix = 0; ix < g.nx; ++ix) mean += basis.coefficients(which, f.cell(ix));
  mean /= g.nx;
  const ArrayXd shift = (basis.columns(which) * mean).array();
  for (int ix = 0; ix < g.nx; ++ix) f.cell(ix) -= shift;
}

}  // namespace esbgk
