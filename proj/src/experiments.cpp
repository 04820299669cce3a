#include "esbgk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#include <json.hpp>

#include "esbgk/micro_macro.hpp"

namespace esbgk {

using nlohmann::json;

namespace {

json to_json(const CheckResult& c) {
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return json{{"check", c.check},
              {"samples", c.samples},
              {"worst_margin", finite_or_null(c.worst_margin)},
              {"tolerance", c.tolerance},
              {"pass", c.pass}};
}

// Running minimum of a signed margin.
struct MarginTracker {
  std::string name;
  double tolerance;
  long samples = 0;
  double worst = std::numeric_limits<double>::infinity();

  void add(double margin) {
    ++samples;
    if (!(margin >= worst)) worst = margin;  // NaN sticks
  }
  CheckResult result() const {
    return {name, samples, worst, tolerance, worst >= -tolerance};
  }
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

bool homogeneous(const InitialSpec& spec) { return spec.kind != InitialKind::perturbation; }

}  // namespace

void write_report(std::ostream& out, const std::vector<CheckResult>& checks) {
  json doc = json::array();
  for (const auto& c : checks) doc.push_back(to_json(c));
  out << doc.dump(2) << '\n';
}

void write_failure(const std::filesystem::path& out_dir, const std::string& command, int status,
                   const std::string& reason, const std::vector<CheckResult>& failed) {
  json doc{{"command", command}, {"status", status}, {"reason", reason}};
  json items = json::array();
  for (const auto& c : failed) items.push_back(to_json(c));
  doc["failed_checks"] = items;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream out(out_dir / "failure.json");
  if (out) out << doc.dump(2) << '\n';
  std::cerr << doc.dump() << '\n';
}

ArrayXd gaussian_state(const PhaseGrid& grid, double rho, const Vector3d& U, const Matrix3d& Theta,
                       double T_I) {
  const Matrix3d inv = Theta.inverse();
  const double norm_v = rho / std::sqrt((2.0 * std::numbers::pi * Theta).determinant());
  ArrayXd G(grid.velocity_count());
  for (int iv = 0; iv < grid.velocity_count(); ++iv) {
    const Vector3d c = Vector3d(grid.v1(iv), grid.v2(iv), grid.v3(iv)) - U;
    G(iv) = norm_v * std::exp(-0.5 * c.dot(inv * c));
  }
  const double norm_i = lambda_delta(grid.delta) / std::pow(T_I, 0.5 * grid.delta);
  const ArrayXd H = norm_i * (-grid.s / T_I).exp();
  return SeparableDensity{G, H}.expand(grid);
}

ScalarField initial_field(const ProjectionBasis& basis, const ModelParams& params,
                          const InitialSpec& spec) {
  const PhaseGrid& grid = basis.grid();
  switch (spec.kind) {
    case InitialKind::equilibrium:
      return ScalarField::uniform(grid, basis.maxwellian());
    case InitialKind::shifted:
      return ScalarField::uniform(grid, gaussian_state(grid, 1.0, spec.u0, Matrix3d::Identity(), 1.0));
    case InitialKind::anisotropic:
      return ScalarField::uniform(
          grid, gaussian_state(grid, 1.0, Vector3d::Zero(), spec.theta0.asDiagonal(), spec.t_internal0));
    case InitialKind::perturbation:
      break;
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  ScalarField f(grid);
  for (int k : spec.modes) {
    const ArrayXd q = smooth_random_field(basis, rng);
    const double phi = phase(rng);
    for (int ix = 0; ix < grid.nx; ++ix)
      f.cell(ix) += spec.amplitude *
                    std::cos(2.0 * std::numbers::pi * k * grid.x(ix) / grid.length + phi) * q;
  }
  make_admissible(basis, macro_projection(params), f);
  return from_perturbation(grid, f);
}

double invariant_drift(const Diagnostics& diagnostics) {
  if (diagnostics.rows.empty()) return 0.0;
  const auto& r0 = diagnostics.rows.front();
  auto rel = [&](double q, double q0) {
    return std::abs(q - q0) / std::max(std::abs(q0), std::abs(r0.mass));
  };
  double worst = 0.0;
  for (const auto& r : diagnostics.rows) {
    worst = std::max(worst, rel(r.mass, r0.mass));
    for (int i = 0; i < 3; ++i) worst = std::max(worst, rel(r.momentum(i), r0.momentum(i)));
    worst = std::max(worst, rel(r.energy, r0.energy));
  }
  return worst;
}

std::vector<CheckResult> linear_checks(const ProjectionBasis& basis, const ModelParams& params,
                                       const ExperimentSpec& spec) {
  const PhaseGrid& grid = basis.grid();
  std::vector<CheckResult> out;

  MarginTracker orthonormal{"basis_orthonormality", 1e-13};
  for (Projection p : kAllProjections) {
    const MatrixXd& q = basis.columns(p);
    const MatrixXd gram = q.transpose() * grid.weight.matrix().asDiagonal() * q;
    orthonormal.add(-(gram - MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff());
  }
  out.push_back(orthonormal.result());

  MarginTracker span{"combined_energy_in_monatomic_span", 1e-12};
  {
    const ArrayXd e = basis.combined_energy_mode();
    span.add(-basis.norm(e - basis.project(Projection::monatomic, e)));
  }
  out.push_back(span.result());

  MarginTracker gram_diag{"gram_diagonal_12", 1e-6}, gram_off{"gram_offdiagonal_minus6", 1e-6};
  {
    const double scale = 18.0;  // (3√2)²
    for (int i = 0; i < 3; ++i) {
      const ArrayXd ci = basis.diagonal_mode(i);
      for (int j = 0; j < 3; ++j) {
        const double g = scale * basis.dot(ci, basis.diagonal_mode(j));
        if (i == j) gram_diag.add(-std::abs(g - 12.0));
        else gram_off.add(-std::abs(g + 6.0));
      }
    }
  }
  out.push_back(gram_diag.result());
  out.push_back(gram_off.result());

  MarginTracker idem{"projection_idempotence", 1e-12}, ortho{"projection_orthogonality", 1e-12};
  MarginTracker identity{"dissipation_identity", 1e-10}, coercive{"coercivity_dichotomy", 1e-10};
  MarginTracker b_positive{"monatomic_dissipation_nonnegative", 1e-10};
  std::mt19937_64 rng(spec.seed);
  for (int sample = 0; sample < spec.samples; ++sample) {
    const ArrayXd f = smooth_random_field(basis, rng);
    const ProjectedParts parts = decompose(basis, f);
    const double norm_f = basis.norm(f), norm2 = norm_f * norm_f;
    const ArrayXd* pieces[4] = {&parts.pp, &parts.pm, &parts.p1, &parts.p2};
    for (std::size_t k = 0; k < kAllProjections.size(); ++k)
      idem.add(-basis.norm(basis.project(kAllProjections[k], *pieces[k]) - *pieces[k]) / norm_f);
    const std::pair<Projection, const ArrayXd*> pairs[6] = {
        {Projection::monatomic, &parts.p1},    {Projection::diagonal, &parts.pm},
        {Projection::monatomic, &parts.p2},    {Projection::off_diagonal, &parts.pm},
        {Projection::diagonal, &parts.p2},     {Projection::off_diagonal, &parts.p1}};
    for (const auto& [p, piece] : pairs) ortho.add(-basis.norm(basis.project(p, *piece)) / norm_f);

    for (double nu : spec.nus) {
      for (double theta : spec.thetas) {
        const ModelParams pr(nu, theta, params.delta());
        const DissipationTerms d = dissipation_terms(basis, pr, parts);
        identity.add(-std::abs(d.lhs - (theta * d.A + (1.0 - theta) * d.B)) / norm2);
        coercive.add(coercivity_margin(basis, pr, parts) / norm2);
        b_positive.add(d.B / norm2);
      }
    }
  }
  for (const auto* t : {&idem, &ortho, &identity, &coercive, &b_positive}) out.push_back(t->result());

  MarginTracker kernel{"kernel_dimension", 0.0}, split{"split_mode_response", 1e-8};
  for (double theta : spec.thetas) {
    const ModelParams pr(params.nu(), theta, params.delta());
    const int expected = theta > 0.0 ? 5 : 6;
    kernel.add(-std::abs(kernel_dimension(basis, pr).dimension - expected));
    split.add(-std::abs(split_mode_response(basis, pr) - split_mode_response_exact(pr)));
  }
  out.push_back(kernel.result());
  out.push_back(split.result());

  // Slopes within [1.9, 2.1]: margin 0.1 - |slope - 2|.
  MarginTracker order{"linearization_order", 0.0};
  {
    std::mt19937_64 field_rng(spec.seed + 1);
    const std::vector<double> eps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    for (int k = 0; k < 5; ++k) {
      const ArrayXd f = smooth_random_field(basis, field_rng);
      const LinearizationOrder lo = linearization_residual(basis, params, f, eps);
      order.add(0.1 - std::abs(lo.maxwellian_slope - 2.0));
      order.add(0.1 - std::abs(lo.frequency_slope - 2.0));
    }
  }
  out.push_back(order.result());
  return out;
}

std::vector<DichotomyRow> dichotomy_sweep(const ProjectionBasis& basis, double nu,
                                          const ExperimentSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<ProjectedParts> fields;
  for (int s = 0; s < spec.samples; ++s) fields.push_back(decompose(basis, smooth_random_field(basis, rng)));

  std::vector<DichotomyRow> rows;
  for (double theta : spec.thetas) {
    const ModelParams pr(nu, theta, basis.grid().delta);
    DichotomyRow row;
    row.theta = theta;
    row.kernel_dim = kernel_dimension(basis, pr).dimension;
    row.split_norm = split_mode_response(basis, pr);
    row.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& parts : fields) {
      const double n2 = basis.dot(parts.f, parts.f);
      row.worst_margin = std::min(row.worst_margin, coercivity_margin(basis, pr, parts) / n2);
    }
    rows.push_back(row);
  }
  return rows;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double skip,
                   double floor) {
  DecayFit fit;
  if (t.empty()) return fit;
  const double start = skip * t.back();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < start) continue;
    if (!(y[i] > floor)) {
      fit.truncated = true;
      break;
    }
    xs.push_back(t[i]);
    ys.push_back(std::log(y[i]));
  }
  fit.points = int(xs.size());
  if (fit.points < 3) return fit;
  const double n = fit.points;
  double sx = 0, sy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  fit.lambda = -slope;
  fit.intercept = my - slope * mx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
  return fit;
}

int cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir) {
  const std::string command = "simulate";
  std::filesystem::create_directories(out_dir);
  const ModelParams params = config.params();
  const PhaseGrid grid = build_grid(params, config.grid);
  const ProjectionBasis basis(grid);
  ScalarField F0 = initial_field(basis, params, config.initial);
  const ArrayXd m = basis.maxwellian();

  auto macro = open_output(out_dir / "macro.csv");
  auto coeffs = open_output(out_dir / "coeffs.csv");
  auto ratio = open_output(out_dir / "micro_macro.csv");
  macro << "t,x,rho,U1,U2,U3,T_tr,T_I,T_delta,T_theta,lamMin\n";
  const bool split = params.theta() == 0.0;
  coeffs << "t,x,a,b1,b2,b3,c" << (split ? ",d" : "") << '\n';
  ratio << "t,R\n";
  double max_dev = 0.0;

  auto observer = [&](int, double t, const ScalarField& F) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const MacroState st = compute_moments(grid, params, F.cell(ix));
      macro << t << ',' << grid.x(ix) << ',' << st.rho << ',' << st.U(0) << ',' << st.U(1) << ','
            << st.U(2) << ',' << st.T_tr << ',' << st.T_I << ',' << st.T_delta << ',' << st.T_theta
            << ',' << check_tensor_spd(st) << '\n';
    }
    const ScalarField f = to_perturbation(grid, F);
    const MacroCoeffs mc = extract_coeffs(basis, params, f);
    for (int ix = 0; ix < grid.nx; ++ix) {
      coeffs << t << ',' << grid.x(ix) << ',' << mc.a(ix) << ',' << mc.b(ix, 0) << ','
             << mc.b(ix, 1) << ',' << mc.b(ix, 2) << ',' << mc.c(ix);
      if (split) coeffs << ',' << mc.d(ix);
      coeffs << '\n';
    }
    ratio << t << ',' << control_ratio(basis, params, f, config.solver.energy_order) << '\n';
    for (int ix = 0; ix < grid.nx; ++ix)
      max_dev = std::max(max_dev, (F.cell(ix) - m).abs().maxCoeff());
  };

  const RunResult result = run(grid, params, config.solver, std::move(F0), observer);
  {
    auto diag = open_output(out_dir / "diagnostics.csv");
    result.diagnostics.write_csv(diag);
  }

  const auto& rows = result.diagnostics.rows;
  const double drift = invariant_drift(result.diagnostics);
  double min_f = std::numeric_limits<double>::infinity();
  double worst_h_increase = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    min_f = std::min(min_f, rows[i].min_f);
    if (i > 0)
      worst_h_increase =
          std::max(worst_h_increase, (rows[i].H - rows[i - 1].H) / std::abs(rows[i - 1].H));
  }

  std::vector<CheckResult> checks;
  checks.push_back({"invariant_drift", long(rows.size()), -drift, 1e-10, drift <= 1e-10});
  checks.push_back({"positivity", long(rows.size()), min_f, 0.0, min_f >= 0.0});
  if (homogeneous(config.initial))
    checks.push_back({"h_nonincreasing", long(rows.size()) - 1, -worst_h_increase, 1e-12,
                      worst_h_increase <= 1e-12});

  json summary{{"steps", result.steps_taken},
               {"dt", result.dt},
               {"max_deviation_from_m", max_dev},
               {"completed", !result.failure.has_value()}};
  json list = json::array();
  for (const auto& c : checks) list.push_back(to_json(c));
  summary["checks"] = list;
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << '\n';

  if (result.failure) {
    write_failure(out_dir, command, 3, "solver aborted: " + *result.failure);
    return 3;
  }
  std::vector<CheckResult> failed;
  for (const auto& c : checks)
    if (!c.pass) failed.push_back(c);
  if (!failed.empty()) {
    write_failure(out_dir, command, 1, "invariant breach", failed);
    return 1;
  }
  return 0;
}

int cmd_verify_linear(const RunConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ModelParams params = config.params();
  const PhaseGrid grid = build_grid(params, config.grid);
  const ProjectionBasis basis(grid);
  const std::vector<CheckResult> checks = linear_checks(basis, params, config.experiment);
  {
    std::ofstream out(out_dir / "report.json");
    write_report(out, checks);
  }
  std::vector<CheckResult> failed;
  for (const auto& c : checks)
    if (!c.pass) failed.push_back(c);
  if (!failed.empty()) {
    write_failure(out_dir, "verify-linear", 1, "linear checks failed", failed);
    return 1;
  }
  return 0;
}

int cmd_dichotomy_sweep(const RunConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const ModelParams params = config.params();
  const PhaseGrid grid = build_grid(params, config.grid);
  const ProjectionBasis basis(grid);
  const auto rows = dichotomy_sweep(basis, config.nu, config.experiment);
  auto out = open_output(out_dir / "dichotomy.csv");
  out << "theta,kernel_dim,split_norm,worst_margin\n";
  for (const auto& r : rows)
    out << r.theta << ',' << r.kernel_dim << ',' << r.split_norm << ',' << r.worst_margin << '\n';
  return 0;
}

int cmd_decay(const RunConfig& config, const std::filesystem::path& out_dir) {
  const std::string command = "decay";
  std::filesystem::create_directories(out_dir);
  const ModelParams params = config.params();
  const PhaseGrid grid = build_grid(params, config.grid);
  const ProjectionBasis basis(grid);
  InitialSpec init = config.initial;
  init.kind = InitialKind::perturbation;
  const int order = config.solver.energy_order;

  auto csv = open_output(out_dir / "decay.csv");
  csv << "t,energy,Enorm,R\n";

  if (init.amplitude == 0.0) {
    csv << 0.0 << ',' << 0.0 << ',' << 0.0 << ",nan\n";
    json fit{{"status", "already at equilibrium"}, {"lambda", nullptr}, {"r_squared", nullptr}};
    std::ofstream(out_dir / "fit.json") << fit.dump(2) << '\n';
    std::cout << "already at equilibrium\n";
    return 0;
  }

  const ArrayXd m = basis.maxwellian();
  std::vector<double> times, energy;
  EnergyFunctional functional;
  auto observer = [&](int, double t, const ScalarField& F) {
    const double inst = perturbation_energy(grid, F, m, order);
    const ScalarField f = to_perturbation(grid, F);
    const double R = control_ratio(basis, params, f, order);
    times.push_back(t);
    energy.push_back(inst);
    csv << t << ',' << inst << ',' << functional.add(t, inst) << ',' << R << '\n';
  };
  const RunResult result = run(grid, params, config.solver, initial_field(basis, params, init), observer);
  csv.flush();
  {
    auto diag = open_output(out_dir / "diagnostics.csv");
    result.diagnostics.write_csv(diag);
  }
  if (result.failure) {
    write_failure(out_dir, command, 3, "solver aborted: " + *result.failure);
    return 3;
  }

  // Floor: roundoff level of Σ‖f‖² relative to its start.
  const double floor = std::max(1e-28, 1e-24 * energy.front());
  const DecayFit fit = fit_decay(times, energy, 0.1, floor);
  const bool pass = fit.points >= 3 && fit.lambda > 0.0 && fit.r_squared >= 0.98;
  json doc{{"lambda", fit.lambda},     {"intercept", fit.intercept}, {"r_squared", fit.r_squared},
           {"points", fit.points},     {"truncated", fit.truncated}, {"theta", params.theta()},
           {"nu", params.nu()},        {"delta", params.delta()},    {"pass", pass}};
  std::ofstream(out_dir / "fit.json") << doc.dump(2) << '\n';
  std::cout << "lambda = " << fit.lambda << ", R^2 = " << fit.r_squared
            << (fit.truncated ? " (fit over resolved prefix)" : "") << '\n';
  if (!pass) {
    CheckResult c{"decay_fit", fit.points, std::min(fit.lambda, fit.r_squared - 0.98), 0.0, false};
    write_failure(out_dir, command, 1, "decay fit outside contract (lambda > 0, R^2 >= 0.98)", {c});
    return 1;
  }
  return 0;
}

}  // namespace esbgk
