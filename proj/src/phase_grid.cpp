#include "esbgk/phase_grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "esbgk/quadrature.hpp"

namespace esbgk {

double auto_i_max(double delta) { return std::pow(kTailExponent, 0.5 * delta); }

double lambda_delta(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("lambda_delta: delta must be positive");
  const double s_cut = 50.0 + 4.0 * delta;
  double integral = 0.0;
  if (delta < 2.0) {
    // e^{-I^{2/δ}} is C¹ at I = 0 when 2/δ > 1.
    const double exponent = 2.0 / delta;
    const double hi = std::pow(s_cut, 0.5 * delta);
    integral = integrate_adaptive([exponent](double i) { return std::exp(-std::pow(i, exponent)); },
                                  0.0, hi, 1e-13)
                   .value;
  } else {
    // dI = (δ/2) s^{δ/2-1} ds, bounded for δ ≥ 2.
    const double power = 0.5 * delta - 1.0;
    integral = integrate_adaptive(
                   [delta, power](double s) {
                     return s == 0.0 ? (power == 0.0 ? 0.5 * delta : 0.0)
                                     : 0.5 * delta * std::pow(s, power) * std::exp(-s);
                   },
                   0.0, s_cut, 1e-13)
                   .value;
  }
  return 1.0 / integral;
}

PhaseGrid build_grid(const ModelParams& params, const GridSpec& spec) {
  // nx = 1 is a space-homogeneous run.
  if (spec.nx < 1 || spec.nv < 4 || spec.ni < 4)
    throw GridError("grid counts must satisfy nx >= 1, nv >= 4, ni >= 4 (nx=" + std::to_string(spec.nx) +
                    ", nv=" + std::to_string(spec.nv) + ", ni=" + std::to_string(spec.ni) + ")");
  if (!(spec.length > 0.0)) throw GridError("domain length must be positive");

  PhaseGrid g;
  g.nx = spec.nx;
  g.nv = spec.nv;
  g.ni = spec.ni;
  g.delta = params.delta();
  g.length = spec.length;
  g.dx = spec.length / spec.nx;
  g.v_max = spec.v_max.value_or(8.0);
  g.i_max = spec.i_max.value_or(auto_i_max(g.delta));

  if (!(g.v_max > 0.0) || 0.5 * g.v_max * g.v_max < kTailExponent * (1.0 - 1e-12))
    throw GridError("v_max = " + std::to_string(g.v_max) +
                    " violates the tail criterion exp(-v_max^2/2) < 1e-12");
  const double s_cut = std::pow(g.i_max, 2.0 / g.delta);
  if (!(g.i_max > 0.0) || s_cut < kTailExponent * (1.0 - 1e-12))
    throw GridError("i_max = " + std::to_string(g.i_max) +
                    " violates the tail criterion exp(-i_max^{2/delta}) < 1e-12");

  g.x = ArrayXd::LinSpaced(g.nx, 0.5 * g.dx, g.length - 0.5 * g.dx);

  const double h = 2.0 * g.v_max / (g.nv - 1);
  g.v_axis = ArrayXd::LinSpaced(g.nv, -g.v_max, g.v_max);
  g.w_axis = ArrayXd::Constant(g.nv, h);
  g.w_axis(0) = g.w_axis(g.nv - 1) = 0.5 * h;

  const int nv3 = g.velocity_count();
  g.v1.resize(nv3);
  g.v2.resize(nv3);
  g.v3.resize(nv3);
  g.w_v.resize(nv3);
  for (int a = 0, n = 0; a < g.nv; ++a)
    for (int b = 0; b < g.nv; ++b)
      for (int c = 0; c < g.nv; ++c, ++n) {
        g.v1(n) = g.v_axis(a);
        g.v2(n) = g.v_axis(b);
        g.v3(n) = g.v_axis(c);
        g.w_v(n) = g.w_axis(a) * g.w_axis(b) * g.w_axis(c);
      }
  g.v_sq = g.v1.square() + g.v2.square() + g.v3.square();

  const double alpha = 0.5 * g.delta - 1.0;
  const GaussLaguerreRule rule = gauss_laguerre(g.ni, alpha);
  if (rule.nodes(g.ni - 1) < s_cut * (1.0 - 1e-12))
    throw GridError("ni = " + std::to_string(g.ni) + " nodes reach I^{2/delta} = " +
                    std::to_string(rule.nodes(g.ni - 1)) + ", short of the cutoff " +
                    std::to_string(s_cut) + "; increase ni");
  g.s = rule.nodes;
  g.energy_nodes = g.s.pow(0.5 * g.delta);
  g.w_i = 0.5 * g.delta * rule.log_scaled_weights.exp();

  g.weight.resize(g.nodes_per_cell());
  for (int iv = 0; iv < nv3; ++iv)
    g.weight.segment(Eigen::Index(iv) * g.ni, g.ni) = g.w_v(iv) * g.w_i;
  return g;
}

ArrayXd global_maxwellian(const PhaseGrid& grid) {
  const double lam = lambda_delta(grid.delta);
  const double norm = lam * std::pow(2.0 * std::numbers::pi, -1.5);
  const ArrayXd velocity = norm * (-0.5 * grid.v_sq).exp();
  const ArrayXd energy = (-grid.s).exp();
  ArrayXd m(grid.nodes_per_cell());
  for (int iv = 0; iv < grid.velocity_count(); ++iv)
    m.segment(Eigen::Index(iv) * grid.ni, grid.ni) = velocity(iv) * energy;
  return m;
}

ScalarField ScalarField::uniform(const PhaseGrid& grid, const ArrayXd& slice) {
  ScalarField field(grid);
  for (int ix = 0; ix < grid.nx; ++ix) field.cell(ix) = slice;
  return field;
}

}  // namespace esbgk
