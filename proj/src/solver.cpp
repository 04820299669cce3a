#include "esbgk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "esbgk/micro_macro.hpp"

namespace esbgk {

namespace {

double limited_slope(double dm, double dp, Limiter limiter) {
  switch (limiter) {
    case Limiter::none:
      return 0.0;
    case Limiter::minmod:
      if (dm * dp <= 0.0) return 0.0;
      return dm > 0.0 ? std::min(dm, dp) : std::max(dm, dp);
    case Limiter::vanleer:
      if (dm * dp <= 0.0) return 0.0;
      return 2.0 * dm * dp / (dm + dp);
  }
  return 0.0;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 0.9)) throw std::invalid_argument("cfl must lie in (0, 0.9]");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (steps < 0) throw std::invalid_argument("steps must be nonnegative");
  if (output_every < 1) throw std::invalid_argument("output_every must be at least 1");
  if (energy_order < 0 || energy_order > 2)
    throw std::invalid_argument("energy_order must be 0, 1 or 2");
}

StepPlan plan_steps(const PhaseGrid& grid, const SolverConfig& config) {
  config.validate();
  double dt = config.cfl * grid.dx / grid.v_max;
  if (config.steps > 0) dt = std::min(dt, config.t_end / config.steps);
  StepPlan plan;
  plan.steps = int(std::ceil(config.t_end / dt * (1.0 - 1e-12)));
  plan.steps = std::max(plan.steps, 1);
  plan.dt = config.t_end / plan.steps;
  return plan;
}

void Diagnostics::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  out.precision(17);
  for (const auto& r : rows) {
    out << r.t << ',' << r.mass << ',' << r.momentum(0) << ',' << r.momentum(1) << ','
        << r.momentum(2) << ',' << r.energy << ',' << r.H << ',' << r.energy_norm << ','
        << r.min_f << ',' << r.lambda_min << '\n';
  }
}

MomentTarget total_invariants(const PhaseGrid& grid, const ScalarField& F) {
  long double mass = 0, mom[3] = {0, 0, 0}, energy = 0;
  for (int ix = 0; ix < grid.nx; ++ix) {
    const MomentTarget c = collision_invariants(grid, F.cell(ix));
    mass += c.mass;
    for (int i = 0; i < 3; ++i) mom[i] += c.momentum(i);
    energy += c.energy;
  }
  MomentTarget out;
  out.mass = double(mass * grid.dx);
  for (int i = 0; i < 3; ++i) out.momentum(i) = double(mom[i] * grid.dx);
  out.energy = double(energy * grid.dx);
  return out;
}

void transport_step(const PhaseGrid& grid, ScalarField& F, double dt, Limiter limiter,
                    double cfl_limit) {
  const double courant = grid.v_max * dt / grid.dx;
  if (courant > cfl_limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "CFL violation: v_max*dt/dx = " << courant << " exceeds " << cfl_limit;
    throw CflError(msg.str());
  }
  const int nx = grid.nx, ni = grid.ni;
  const Eigen::Index stride = grid.nodes_per_cell();
  double* data = F.values().data();

#pragma omp parallel
  {
    // Column of one velocity node: nx cells by ni internal-energy nodes.
    std::vector<double> col(std::size_t(nx) * ni), flux(std::size_t(nx) * ni);
#pragma omp for schedule(static)
    for (int iv = 0; iv < grid.velocity_count(); ++iv) {
      const double a = grid.v1(iv);
      if (a == 0.0) continue;
      const double c = std::abs(a) * dt / grid.dx;
      const double corr = 0.5 * (1.0 - c);
      const Eigen::Index offset = Eigen::Index(iv) * ni;
      for (int ix = 0; ix < nx; ++ix)
        std::copy_n(data + ix * stride + offset, ni, col.data() + std::size_t(ix) * ni);

      // flux[ix] lives on the interface ix+1/2.
      for (int ix = 0; ix < nx; ++ix) {
        const double* fm = col.data() + std::size_t((ix + nx - 1) % nx) * ni;
        const double* f0 = col.data() + std::size_t(ix) * ni;
        const double* fp = col.data() + std::size_t((ix + 1) % nx) * ni;
        const double* fpp = col.data() + std::size_t((ix + 2) % nx) * ni;
        double* out = flux.data() + std::size_t(ix) * ni;
        if (a > 0.0) {
          for (int k = 0; k < ni; ++k)
            out[k] = a * (f0[k] + corr * limited_slope(f0[k] - fm[k], fp[k] - f0[k], limiter));
        } else {
          for (int k = 0; k < ni; ++k)
            out[k] = a * (fp[k] - corr * limited_slope(fp[k] - f0[k], fpp[k] - fp[k], limiter));
        }
      }
      const double r = dt / grid.dx;
      for (int ix = 0; ix < nx; ++ix) {
        const double* right = flux.data() + std::size_t(ix) * ni;
        const double* left = flux.data() + std::size_t((ix + nx - 1) % nx) * ni;
        double* dst = data + ix * stride + offset;
        for (int k = 0; k < ni; ++k) dst[k] = col[std::size_t(ix) * ni + k] - r * (right[k] - left[k]);
      }
    }
  }
}

RelaxationReport relaxation_step(const PhaseGrid& grid, const ModelParams& params, ScalarField& F,
                                 double dt, RelaxationScheme scheme) {
  const int nx = grid.nx, ni = grid.ni;
  std::vector<double> lambda(nx), t_theta(nx);
  std::vector<std::exception_ptr> errors(nx);

#pragma omp parallel for schedule(dynamic, 1)
  for (int ix = 0; ix < nx; ++ix) {
    try {
      auto cell = F.cell(ix);
      const MacroState st = compute_moments(grid, params, cell);
      lambda[ix] = check_tensor_spd(st);
      t_theta[ix] = st.T_theta;
      const SeparableDensity raw = ellipsoidal_maxwellian(grid, params, st);
      const MatchedMaxwellian M = moment_match(grid, raw, collision_invariants(grid, cell));
      const double kdt = st.collision_frequency * dt;
      double keep, gain;
      if (scheme == RelaxationScheme::implicit) {
        keep = 1.0 / (1.0 + kdt);
        gain = kdt / (1.0 + kdt);
      } else {
        keep = std::exp(-kdt);
        gain = -std::expm1(-kdt);
      }
      const ArrayXd& G = M.density.velocity;
      const ArrayXd& H = M.density.energy;
      double* f = cell.data();
      for (int iv = 0; iv < grid.velocity_count(); ++iv) {
        double* fv = f + Eigen::Index(iv) * ni;
        const double g = gain * G(iv);
        for (int k = 0; k < ni; ++k) fv[k] = keep * fv[k] + g * H(k);
      }
    } catch (...) {
      errors[ix] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  RelaxationReport report;
  report.min_lambda = *std::min_element(lambda.begin(), lambda.end());
  report.min_T_theta = *std::min_element(t_theta.begin(), t_theta.end());
  return report;
}

namespace {

double min_tensor_eigenvalue(const PhaseGrid& grid, const ModelParams& params, const ScalarField& F) {
  std::vector<double> lambda(grid.nx);
  std::vector<std::exception_ptr> errors(grid.nx);
#pragma omp parallel for schedule(static)
  for (int ix = 0; ix < grid.nx; ++ix) {
    try {
      lambda[ix] = check_tensor_spd(compute_moments(grid, params, F.cell(ix)));
    } catch (...) {
      errors[ix] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return *std::min_element(lambda.begin(), lambda.end());
}

}  // namespace

RunResult run(const PhaseGrid& grid, const ModelParams& params, const SolverConfig& config,
              ScalarField F0, const OutputObserver& observer) {
  if (!F0.matches(grid)) throw std::invalid_argument("initial field does not match the grid");
  if (!F0.values().allFinite()) throw std::invalid_argument("initial field has non-finite entries");
  if ((F0.values() < 0.0).any()) throw std::invalid_argument("initial field has negative entries");

  const StepPlan plan = plan_steps(grid, config);
  const ArrayXd m = global_maxwellian(grid);

  RunResult result;
  result.F = std::move(F0);
  result.dt = plan.dt;
  ScalarField& F = result.F;
  EnergyFunctional energy_functional;

  auto record = [&](int step, double t) {
    DiagnosticsRow row;
    row.t = t;
    const MomentTarget inv = total_invariants(grid, F);
    row.mass = inv.mass;
    row.momentum = inv.momentum;
    row.energy = inv.energy;
    row.min_f = F.values().minCoeff();
    row.H = h_functional(grid, F);
    row.energy_norm =
        energy_functional.add(t, perturbation_energy(grid, F, m, config.energy_order));
    row.lambda_min = min_tensor_eigenvalue(grid, params, F);
    result.diagnostics.rows.push_back(row);
    if (observer) observer(step, t, F);
  };

  const double dt = plan.dt;
  const bool strang = config.splitting == Splitting::strang;
  try {
    record(0, 0.0);
    for (int n = 1; n <= plan.steps; ++n) {
      if (strang) {
        transport_step(grid, F, 0.5 * dt, config.limiter, config.cfl);
        relaxation_step(grid, params, F, dt, config.relaxation);
        transport_step(grid, F, 0.5 * dt, config.limiter, config.cfl);
      } else {
        transport_step(grid, F, dt, config.limiter, config.cfl);
        relaxation_step(grid, params, F, dt, config.relaxation);
      }
      result.steps_taken = n;
      if (!F.values().allFinite())
        throw PhysicalStateError("non-finite values after step " + std::to_string(n));
      if (n % config.output_every == 0 || n == plan.steps) record(n, n * dt);
    }
  } catch (const std::exception& e) {
    result.failure = "step " + std::to_string(result.steps_taken + 1) + ": " + e.what();
  }
  return result;
}

}  // namespace esbgk
