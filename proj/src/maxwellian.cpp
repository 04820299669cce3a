#include "esbgk/maxwellian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "esbgk/sym3.hpp"

namespace esbgk {

namespace {

using Vector5d = Eigen::Matrix<double, 5, 1>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;

// Moments of a separable density against φ = (1, v, |v|²/2 + s) and φφᵀ.
struct InvariantMoments {
  Vector5d first;
  Matrix5d second;
};

InvariantMoments separable_moments(const PhaseGrid& grid, const ArrayXd& velocity,
                                   const ArrayXd& energy) {
  // Velocity sums of G(v) times {1, v_i, v_iv_j, e_v, v_i e_v, e_v²}, e_v = |v|²/2.
  long double g0 = 0, g1[3] = {0, 0, 0}, g2[3][3] = {}, ge = 0, gve[3] = {0, 0, 0}, gee = 0;
  for (int iv = 0; iv < grid.velocity_count(); ++iv) {
    const double wg = grid.w_v(iv) * velocity(iv);
    const double v[3] = {grid.v1(iv), grid.v2(iv), grid.v3(iv)};
    const double ev = 0.5 * grid.v_sq(iv);
    g0 += wg;
    ge += wg * ev;
    gee += wg * ev * ev;
    for (int i = 0; i < 3; ++i) {
      g1[i] += wg * v[i];
      gve[i] += wg * v[i] * ev;
      for (int j = i; j < 3; ++j) g2[i][j] += wg * v[i] * v[j];
    }
  }
  long double h0 = 0, h1 = 0, h2 = 0;
  for (int k = 0; k < grid.ni; ++k) {
    const double wh = grid.w_i(k) * energy(k);
    h0 += wh;
    h1 += wh * grid.s(k);
    h2 += wh * grid.s(k) * grid.s(k);
  }
  InvariantMoments out;
  out.first(0) = double(g0 * h0);
  for (int i = 0; i < 3; ++i) out.first(1 + i) = double(g1[i] * h0);
  out.first(4) = double(ge * h0 + g0 * h1);

  Matrix5d& s = out.second;
  s(0, 0) = out.first(0);
  for (int i = 0; i < 3; ++i) {
    s(0, 1 + i) = s(1 + i, 0) = out.first(1 + i);
    for (int j = i; j < 3; ++j) s(1 + i, 1 + j) = s(1 + j, 1 + i) = double(g2[i][j] * h0);
    s(1 + i, 4) = s(4, 1 + i) = double(gve[i] * h0 + g1[i] * h1);
  }
  s(0, 4) = s(4, 0) = out.first(4);
  s(4, 4) = double(gee * h0 + 2.0L * ge * h1 + g0 * h2);
  return out;
}

}  // namespace

ArrayXd SeparableDensity::expand(const PhaseGrid& grid) const {
  ArrayXd out(grid.nodes_per_cell());
  for (int iv = 0; iv < grid.velocity_count(); ++iv)
    out.segment(Eigen::Index(iv) * grid.ni, grid.ni) = velocity(iv) * energy;
  return out;
}

MomentTarget collision_invariants(const PhaseGrid& grid, const Eigen::Ref<const ArrayXd>& cell) {
  long double mass = 0, mom[3] = {0, 0, 0}, energy = 0;
  for (int iv = 0; iv < grid.velocity_count(); ++iv) {
    const double* f = cell.data() + Eigen::Index(iv) * grid.ni;
    double m0 = 0.0, ms = 0.0;
    for (int k = 0; k < grid.ni; ++k) {
      m0 += grid.w_i(k) * f[k];
      ms += grid.w_i(k) * grid.s(k) * f[k];
    }
    const double w = grid.w_v(iv);
    mass += w * m0;
    mom[0] += w * m0 * grid.v1(iv);
    mom[1] += w * m0 * grid.v2(iv);
    mom[2] += w * m0 * grid.v3(iv);
    energy += w * (0.5 * grid.v_sq(iv) * m0 + ms);
  }
  return {double(mass), Vector3d(double(mom[0]), double(mom[1]), double(mom[2])), double(energy)};
}

MomentTarget collision_invariants(const PhaseGrid& grid, const SeparableDensity& density) {
  const InvariantMoments mom = separable_moments(grid, density.velocity, density.energy);
  return {mom.first(0), mom.first.segment<3>(1), mom.first(4)};
}

SeparableDensity ellipsoidal_maxwellian(const PhaseGrid& grid, const ModelParams& params,
                                        const MacroState& state) {
  const double lam_min = check_tensor_spd(state);
  if (!(lam_min > 0.0))
    throw PhysicalStateError("temperature tensor not positive definite (lambda_min = " +
                             std::to_string(lam_min) + ")");
  if (!(state.T_theta > 0.0))
    throw PhysicalStateError("relaxation temperature T_theta = " + std::to_string(state.T_theta) +
                             " <= 0");
  const double delta = params.delta();
  const Matrix3d inv = spd3_inverse<double>(state.tensor_T);
  const double det = state.tensor_T.determinant();
  const double v_norm = state.rho / std::sqrt(std::pow(2.0 * std::numbers::pi, 3) * det);

  SeparableDensity out;
  out.velocity.resize(grid.velocity_count());
  for (int iv = 0; iv < grid.velocity_count(); ++iv) {
    const Vector3d c(grid.v1(iv) - state.U(0), grid.v2(iv) - state.U(1), grid.v3(iv) - state.U(2));
    out.velocity(iv) = v_norm * std::exp(-0.5 * c.dot(inv * c));
  }
  const double e_norm = lambda_delta(delta) * std::pow(state.T_theta, -0.5 * delta);
  out.energy = e_norm * (-grid.s / state.T_theta).exp();
  return out;
}

MatchedMaxwellian moment_match(const PhaseGrid& grid, const SeparableDensity& raw,
                               const MomentTarget& target, double tolerance, int max_iterations) {
  if (!(target.mass > 0.0))
    throw MomentMatchError("moment target mass must be positive");
  if (!(raw.velocity.minCoeff() > 0.0) || !(raw.energy.minCoeff() > 0.0))
    throw MomentMatchError("raw Maxwellian must be strictly positive");

  Vector5d goal;
  goal << target.mass, target.momentum, target.energy;
  // Residual scales: mass, mass times thermal speed, energy.
  const double speed = std::sqrt(std::max(2.0 * target.energy / target.mass, 1e-300));
  Vector5d scale;
  scale << target.mass, Vector3d::Constant(target.mass * speed), std::abs(target.energy);

  MatchedMaxwellian result;
  Vector5d coeff = Vector5d::Zero();
  ArrayXd velocity = raw.velocity;
  ArrayXd energy = raw.energy;
  for (int it = 0; it <= max_iterations; ++it) {
    const InvariantMoments mom = separable_moments(grid, velocity, energy);
    const Vector5d residual = mom.first - goal;
    const double rel = (residual.array().abs() / scale.array()).maxCoeff();
    result.relative_residual = rel;
    result.iterations = it;
    if (rel <= tolerance) {
      result.density = {std::move(velocity), std::move(energy)};
      result.a = coeff(0);
      result.b = coeff.segment<3>(1);
      result.c = coeff(4);
      return result;
    }
    if (it == max_iterations) break;
    const Vector5d step = mom.second.ldlt().solve(-residual);
    if (!step.allFinite()) break;
    coeff += step;
    velocity = raw.velocity * (coeff(0) + coeff(1) * grid.v1 + coeff(2) * grid.v2 +
                               coeff(3) * grid.v3 + 0.5 * coeff(4) * grid.v_sq).exp();
    energy = raw.energy * (coeff(4) * grid.s).exp();
  }
  throw MomentMatchError("moment matching did not converge after " +
                         std::to_string(max_iterations) + " Newton iterations (relative residual " +
                         std::to_string(result.relative_residual) + "); grid under-resolved?");
}

double h_functional(const PhaseGrid& grid, const Eigen::Ref<const ArrayXd>& cell) {
  long double total = 0;
  for (int iv = 0; iv < grid.velocity_count(); ++iv) {
    const double* f = cell.data() + Eigen::Index(iv) * grid.ni;
    double partial = 0.0;
    for (int k = 0; k < grid.ni; ++k) {
      if (f[k] < 0.0 || std::isnan(f[k]))
        throw PhysicalStateError("H functional needs F >= 0, found " + std::to_string(f[k]));
      if (f[k] > 0.0) partial += grid.w_i(k) * f[k] * std::log(f[k]);
    }
    total += grid.w_v(iv) * partial;
  }
  return double(total);
}

double h_functional(const PhaseGrid& grid, const ScalarField& field) {
  long double total = 0;
  for (int ix = 0; ix < grid.nx; ++ix) total += h_functional(grid, field.cell(ix));
  return double(total) * grid.dx;
}

}  // namespace esbgk
