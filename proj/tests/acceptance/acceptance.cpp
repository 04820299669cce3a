// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "esbgk/experiments.hpp"
#include "esbgk/micro_macro.hpp"
#include "oracles.hpp"

using namespace esbgk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const ModelParams kDefault(0.5, 0.5, 2.0);

const ProjectionBasis& default_basis() {
  static const PhaseGrid g = build_grid(kDefault, GridSpec{1, 24, 32});
  static const ProjectionBasis b(g);
  return b;
}

// 200 seeded fields shared by criteria 1, 3 and 4.
const std::vector<ProjectedParts>& sample_fields() {
  static const std::vector<ProjectedParts> fields = [] {
    std::mt19937_64 rng(20240601);
    std::vector<ProjectedParts> out;
    for (int i = 0; i < 200; ++i)
      out.push_back(decompose(default_basis(), smooth_random_field(default_basis(), rng)));
    return out;
  }();
  return fields;
}

const double kNus[] = {-0.45, 0.0, 0.5, 0.9};
const double kThetas[] = {0.0, 1e-3, 0.5, 1.0};

Outcome projection_algebra() {
  const auto start = std::chrono::steady_clock::now();
  const ProjectionBasis& b = default_basis();
  const auto& fields = sample_fields();
  double worst = 0.0;
  for (const auto& parts : fields) {
    const double n = b.norm(parts.f);
    const ArrayXd* pieces[4] = {&parts.pp, &parts.pm, &parts.p1, &parts.p2};
    for (std::size_t k = 0; k < 4; ++k)
      worst = std::max(worst, b.norm(b.project(kAllProjections[k], *pieces[k]) - *pieces[k]) / n);
    const std::pair<Projection, const ArrayXd*> pairs[6] = {
        {Projection::monatomic, &parts.p1}, {Projection::diagonal, &parts.pm},
        {Projection::monatomic, &parts.p2}, {Projection::off_diagonal, &parts.pm},
        {Projection::diagonal, &parts.p2},  {Projection::off_diagonal, &parts.p1}};
    for (const auto& [p, piece] : pairs) worst = std::max(worst, b.norm(b.project(p, *piece)) / n);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-12 && secs < 30.0,
          fmt("max violation %.3g (tol 1e-12), %.1f s (limit 30 s)", worst, secs)};
}

double gram_error(int nv) {
  const PhaseGrid g = build_grid(kDefault, GridSpec{1, nv, 32});
  const ProjectionBasis b(g);
  double err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double v = 18.0 * b.dot(b.diagonal_mode(i), b.diagonal_mode(j));
      err = std::max(err, std::abs(v - (i == j ? 12.0 : -6.0)));
    }
  return err;
}

Outcome gram_values() {
  const double coarse = gram_error(16), e24 = gram_error(24), fine = gram_error(32);
  // refinement: error drops from Nv=16 to Nv=24 and does not grow beyond roundoff at Nv=32
  const bool improving = e24 < coarse && fine <= std::max(e24, 1e-10);
  return {e24 <= 1e-6 && improving,
          fmt("error %.3g at Nv=24 (tol 1e-6); Nv=16 %.3g, Nv=32 %.3g", e24, coarse, fine)};
}

Outcome dissipation_identity() {
  const ProjectionBasis& b = default_basis();
  double worst = 0.0;
  for (const auto& parts : sample_fields()) {
    const double n2 = b.dot(parts.f, parts.f);
    for (double nu : kNus)
      for (double theta : kThetas) {
        const DissipationTerms d = dissipation_terms(b, ModelParams(nu, theta, 2.0), parts);
        worst = std::max(worst, std::abs(d.lhs - (theta * d.A + (1.0 - theta) * d.B)) / n2);
      }
  }
  return {worst <= 1e-10, fmt("max |residual|/|f|^2 = %.3g over 3200 samples (tol 1e-10)", worst)};
}

Outcome coercivity() {
  const ProjectionBasis& b = default_basis();
  double worst = INFINITY, worst_b = INFINITY;
  for (const auto& parts : sample_fields()) {
    const double n2 = b.dot(parts.f, parts.f);
    for (double nu : kNus)
      for (double theta : kThetas) {
        const ModelParams p(nu, theta, 2.0);
        worst = std::min(worst, coercivity_margin(b, p, parts) / n2);
        worst_b = std::min(worst_b, dissipation_terms(b, p, parts).B / n2);
      }
  }
  return {worst >= -1e-10 && worst_b >= -1e-10,
          fmt("worst margin %.3g, worst B %.3g (both >= -1e-10)", worst, worst_b)};
}

Outcome kernel_dichotomy() {
  const ProjectionBasis& b = default_basis();
  // ⟨e, e_c⟩ for the split mode from oracle Gaussian and internal moments
  const double m2 = oracle::gauss_moment(2), m4 = oracle::gauss_moment(4);
  const double var = 3.0 * m4 + 6.0 * m2 * m2 - 18.0 * m2 + 9.0;
  const double cross = (3.0 * m2 - 3.0) * (2.0 * oracle::internal_moment(1, 2.0) - 2.0);
  const double overlap = (var + cross) / (std::sqrt(6.0) * std::sqrt(10.0));
  bool ok = true;
  double worst_closed = 0.0, worst_oracle = 0.0;
  std::string dims;
  for (double nu : kNus) {
    for (double theta : {0.0, 1e-3, 1e-2, 0.1, 1.0}) {
      const ModelParams p(nu, theta, 2.0);
      const int dim = kernel_dimension(b, p).dimension;
      ok = ok && dim == (theta > 0.0 ? 5 : 6);
      if (nu == 0.5) dims += std::to_string(dim);
      const double got = split_mode_response(b, p);
      const double closed = theta / p.frequency_denominator() * std::sqrt(2.0 / 5.0);
      // ‖L e‖ = θ/(1-ν+θν) √(1 - ⟨e,e_c⟩²)
      const double from_oracle =
          theta / p.frequency_denominator() * std::sqrt(1.0 - overlap * overlap);
      worst_closed = std::max(worst_closed, std::abs(got - closed));
      worst_oracle = std::max(worst_oracle, std::abs(closed - from_oracle));
    }
  }
  ok = ok && worst_closed <= 1e-8 && worst_oracle <= 1e-8;
  return {ok, "kernel dims (theta=0,1e-3,1e-2,0.1,1 at nu=0.5) " + dims +
                  fmt("; split response error %.3g, closed form vs oracle %.3g (tol 1e-8)",
                      worst_closed, worst_oracle)};
}

Outcome linearization_order() {
  const ProjectionBasis& b = default_basis();
  std::mt19937_64 rng(20240602);
  const std::vector<double> eps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 0; k < 5; ++k) {
    const ArrayXd f = smooth_random_field(b, rng);
    for (const ModelParams& p : {kDefault, ModelParams(0.0, 1.0, 2.0), ModelParams(-0.45, 0.0, 2.0)}) {
      const LinearizationOrder r = linearization_residual(b, p, f, eps);
      for (double s : {r.maxwellian_slope, r.frequency_slope}) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
  }
  return {lo >= 1.9 && hi <= 2.1, fmt("slopes in [%.4f, %.4f] (contract [1.9, 2.1])", lo, hi)};
}

Outcome conservation() {
  const auto start = std::chrono::steady_clock::now();
  const PhaseGrid g = build_grid(kDefault, GridSpec{32, 24, 32});
  const ProjectionBasis b(g);
  InitialSpec init;
  init.kind = InitialKind::perturbation;
  init.amplitude = 1e-2;
  init.modes = {1, 2, 3};
  SolverConfig c;
  c.t_end = 20.0;
  c.steps = 1000;
  c.output_every = 50;
  const RunResult r = run(g, kDefault, c, initial_field(b, kDefault, init));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.failure) return {false, "run aborted: " + *r.failure};
  const double drift = invariant_drift(r.diagnostics);
  return {drift <= 1e-10 && r.steps_taken == 1000,
          fmt("drift %.3g over %.0f steps (tol 1e-10), %.0f s (target 600 s)", drift,
              r.steps_taken, secs)};
}

Outcome h_theorem() {
  const PhaseGrid g = build_grid(kDefault, GridSpec{1, 24, 32});
  const Matrix3d Theta = Vector3d(1.5, 0.75, 0.75).asDiagonal();
  double worst = -INFINITY, min_f = INFINITY;
  bool ok = true;
  for (const ModelParams& p : {kDefault, ModelParams(0.0, 1.0, 2.0), ModelParams(-0.45, 0.0, 2.0)}) {
    SolverConfig c;
    c.t_end = 3.0;
    c.steps = 300;
    const RunResult r =
        run(g, p, c, ScalarField::uniform(g, gaussian_state(g, 1.0, Vector3d::Zero(), Theta, 1.0)));
    if (r.failure) return {false, "run aborted: " + *r.failure};
    const auto& rows = r.diagnostics.rows;
    ok = ok && rows.size() == 301;
    for (std::size_t i = 1; i < rows.size(); ++i)
      worst = std::max(worst, (rows[i].H - rows[i - 1].H) / std::abs(rows[i - 1].H));
    for (const auto& row : rows) min_f = std::min(min_f, row.min_f);
  }
  ok = ok && worst <= 1e-12 && min_f >= 0.0;
  return {ok, fmt("max relative H increase %.3g (slack 1e-12), min F %.3g", worst, min_f)};
}

Outcome equilibrium() {
  const PhaseGrid g = build_grid(kDefault, GridSpec{4, 24, 32});
  const ArrayXd m = global_maxwellian(g);
  SolverConfig c;
  c.t_end = 20.0;
  c.steps = 1000;
  c.output_every = 1;
  double worst = 0.0;
  const RunResult r = run(g, kDefault, c, ScalarField::uniform(g, m), [&](int, double, const ScalarField& F) {
    for (int ix = 0; ix < g.nx; ++ix) worst = std::max(worst, (F.cell(ix) - m).abs().maxCoeff());
  });
  if (r.failure) return {false, "run aborted: " + *r.failure};
  return {worst <= 1e-13 && r.steps_taken == 1000,
          fmt("max |F - m| %.3g over %.0f steps (tol 1e-13)", worst, r.steps_taken)};
}

Outcome exponential_decay() {
  const double thetas[] = {0.0, 0.5, 1.0};
  bool ok = true;
  std::string detail;
  for (double theta : thetas) {
    const ModelParams p(0.0, theta, 2.0);
    const PhaseGrid g = build_grid(p, GridSpec{16, 24, 16});
    const ProjectionBasis b(g);
    InitialSpec init;
    init.kind = InitialKind::perturbation;
    init.amplitude = 1e-3;
    SolverConfig c;
    c.t_end = 20.0;
    c.output_every = 8;
    const ArrayXd m = b.maxwellian();
    std::vector<double> t, y;
    const RunResult r = run(g, p, c, initial_field(b, p, init), [&](int, double time, const ScalarField& F) {
      t.push_back(time);
      y.push_back(perturbation_energy(g, F, m, c.energy_order));
    });
    if (r.failure) return {false, "run aborted: " + *r.failure};
    const DecayFit fit = fit_decay(t, y, 0.1, std::max(1e-28, 1e-24 * y.front()));
    ok = ok && fit.points >= 3 && fit.lambda > 0.0 && fit.r_squared >= 0.98;
    detail += fmt("theta=%g: lambda %.4f R^2 %.4f; ", theta, fit.lambda, fit.r_squared);
  }
  return {ok, detail + "(contract lambda > 0, R^2 >= 0.98)"};
}

Outcome relaxation_ode() {
  const ModelParams p(0.0, 1.0, 2.0);
  const PhaseGrid g = build_grid(p, GridSpec{1, 24, 32});
  const Matrix3d Theta0 = Vector3d(1.5, 0.75, 0.75).asDiagonal();
  const ScalarField F0 = ScalarField::uniform(g, gaussian_state(g, 1.0, Vector3d::Zero(), Theta0, 1.0));
  const MacroState s0 = compute_moments(g, p, F0.cell(0));
  oracle::MomentOde ode{s0.rho, s0.T_delta, s0.Theta, s0.T_I};

  SolverConfig c;
  c.t_end = 2.0;
  c.steps = 2000;
  double last_t = 0.0, worst = 0.0;
  const RunResult r = run(g, p, c, F0, [&](int, double t, const ScalarField& F) {
    if (t > last_t) ode.advance(t - last_t, 20);
    last_t = t;
    const MacroState st = compute_moments(g, p, F.cell(0));
    const double got = (st.Theta - st.T_delta * Matrix3d::Identity()).norm();
    worst = std::max(worst, std::abs(got - ode.off_equilibrium_norm()));
  });
  if (r.failure) return {false, "run aborted: " + *r.failure};
  const bool ok = std::abs(r.dt - 1e-3) < 1e-15 && worst <= 1e-6;
  return {ok, fmt("max |off-equilibrium norm - ODE| %.3g at dt %.3g (tol 1e-6)", worst, r.dt)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 projection algebra", projection_algebra},
      {"2 Gram values 12 / -6", gram_values},
      {"3 dissipation identity", dissipation_identity},
      {"4 coercivity dichotomy", coercivity},
      {"5 kernel dichotomy", kernel_dichotomy},
      {"6 linearization order", linearization_order},
      {"7 conservation", conservation},
      {"8 H-theorem", h_theorem},
      {"9 equilibrium fixed point", equilibrium},
      {"10 exponential decay", exponential_decay},
      {"11 relaxation ODE oracle", relaxation_ode},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
