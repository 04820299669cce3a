#include "esbgk/micro_macro.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace esbgk {

MacroCoeffs extract_coeffs(const ProjectionBasis& basis, const ModelParams& params,
                           const ScalarField& f) {
  const PhaseGrid& g = basis.grid();
  const bool split = params.theta() == 0.0;
  const Projection which = macro_projection(params);

  MacroCoeffs out;
  out.a.resize(g.nx);
  out.b.resize(g.nx, 3);
  out.c.resize(g.nx);
  if (split) out.d.resize(g.nx);
  for (int ix = 0; ix < g.nx; ++ix) {
    // Columns keep the order of the raw set: √m, v_i√m, energy mode(s).
    const VectorXd k = basis.coefficients(which, f.cell(ix));
    out.a(ix) = k(0);
    out.b.row(ix) = k.segment<3>(1).transpose();
    out.c(ix) = k(4);
    if (split) out.d(ix) = k(5);
  }
  return out;
}

ScalarField x_derivative(const PhaseGrid& grid, const ScalarField& f, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
  if (order == 0) return f;
  ScalarField out(grid);
  const int nx = grid.nx;
  for (int ix = 0; ix < nx; ++ix) {
    const auto left = f.cell((ix + nx - 1) % nx);
    const auto right = f.cell((ix + 1) % nx);
    if (order == 1)
      out.cell(ix) = (right - left) / (2.0 * grid.dx);
    else
      out.cell(ix) = (right - 2.0 * f.cell(ix) + left) / (grid.dx * grid.dx);
  }
  return out;
}

namespace {

// Σ_{k≤N} ‖∂^k f‖² with f_i supplied per cell; derivatives are formed from
// three neighbouring cells at a time.
template <typename CellFn>
double streamed_energy(const PhaseGrid& grid, CellFn&& cell_of, int max_order) {
  if (max_order < 0 || max_order > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
  const int nx = grid.nx;
  ArrayXd left = cell_of(nx - 1), centre = cell_of(0);
  const ArrayXd first = centre;
  double total = 0.0;
  for (int ix = 0; ix < nx; ++ix) {
    ArrayXd right = ix + 1 < nx ? cell_of(ix + 1) : first;
    total += (grid.weight * centre.square()).sum();
    if (max_order >= 1)
      total += (grid.weight * ((right - left) / (2.0 * grid.dx)).square()).sum();
    if (max_order >= 2)
      total += (grid.weight * ((right - 2.0 * centre + left) / (grid.dx * grid.dx)).square()).sum();
    left = std::move(centre);
    centre = std::move(right);
  }
  return total * grid.dx;
}

}  // namespace

double instantaneous_energy(const PhaseGrid& grid, const ScalarField& f, int max_order) {
  return streamed_energy(grid, [&](int ix) { return ArrayXd(f.cell(ix)); }, max_order);
}

double perturbation_energy(const PhaseGrid& grid, const ScalarField& F, const ArrayXd& m,
                           int max_order) {
  const ArrayXd inv_sqrt = m.sqrt().inverse();
  return streamed_energy(grid, [&](int ix) { return ArrayXd((F.cell(ix) - m) * inv_sqrt); },
                         max_order);
}

double control_ratio(const ProjectionBasis& basis, const ModelParams& params, const ScalarField& f,
                     int max_order, double floor) {
  const PhaseGrid& g = basis.grid();
  const Projection which = macro_projection(params);
  double macro = 0.0, micro = 0.0;
  auto accumulate = [&](const ArrayXd& d) {
    const ArrayXd p = basis.project(which, d);
    const ArrayXd q = d - p;
    macro += basis.dot(p, p) * g.dx;
    micro += basis.dot(q, q) * g.dx;
  };
  const int nx = g.nx;
  for (int ix = 0; ix < nx; ++ix) {
    const auto left = f.cell((ix + nx - 1) % nx);
    const auto centre = f.cell(ix);
    const auto right = f.cell((ix + 1) % nx);
    accumulate(centre);
    if (max_order >= 1) accumulate((right - left) / (2.0 * g.dx));
    if (max_order >= 2) accumulate((right - 2.0 * centre + left) / (g.dx * g.dx));
  }
  if (micro < floor) {
    return macro < floor ? std::numeric_limits<double>::quiet_NaN()
                         : std::numeric_limits<double>::infinity();
  }
  return macro / micro;
}

double EnergyFunctional::add(double t, double instantaneous) {
  if (started_) {
    if (t < last_t_) throw std::invalid_argument("energy functional samples must be time-ordered");
    integral_ += 0.5 * (t - last_t_) * (instantaneous + last_inst_);
  }
  started_ = true;
  last_t_ = t;
  last_inst_ = instantaneous;
  value_ = 0.5 * instantaneous + integral_;
  return value_;
}

std::vector<double> energy_functional(const PhaseGrid& grid, const std::vector<double>& times,
                                      const std::vector<ScalarField>& trajectory, int max_order) {
  if (times.size() != trajectory.size())
    throw std::invalid_argument("energy_functional: times and trajectory differ in length");
  EnergyFunctional acc;
  std::vector<double> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    out.push_back(acc.add(times[i], instantaneous_energy(grid, trajectory[i], max_order)));
  return out;
}

}  // namespace esbgk
