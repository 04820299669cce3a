#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "esbgk/experiments.hpp"
#include "esbgk/micro_macro.hpp"

using namespace esbgk;

namespace {
const ModelParams kParams(0.5, 0.5, 2.0);
const ProjectionBasis& basis() {
  static const PhaseGrid g = build_grid(kParams, GridSpec{8, 24, 12});
  static const ProjectionBasis b(g);
  return b;
}
}  // namespace

TEST_CASE("report entries carry the five fields") {
  std::ostringstream out;
  write_report(out, {{"x", 3, -1e-14, 1e-12, true}});
  const auto doc = nlohmann::json::parse(out.str());
  REQUIRE(doc.size() == 1);
  for (const char* key : {"check", "samples", "worst_margin", "tolerance", "pass"})
    CHECK(doc[0].contains(key));
}

TEST_CASE("gaussian state moments") {
  const PhaseGrid& g = basis().grid();
  const Matrix3d Theta = Vector3d(1.5, 0.75, 0.75).asDiagonal();
  const MacroState st = compute_moments(g, kParams, gaussian_state(g, 2.0, Vector3d(0.2, 0, 0), Theta, 1.3));
  CHECK(st.rho == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(st.U(0) == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(st.Theta(0, 0) == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(st.T_I == doctest::Approx(1.3).epsilon(1e-10));
}

TEST_CASE("perturbation initial data is admissible and deterministic") {
  const ProjectionBasis& b = basis();
  const PhaseGrid& g = b.grid();
  InitialSpec spec;
  spec.kind = InitialKind::perturbation;
  spec.amplitude = 1e-3;
  spec.modes = {1, 2};
  for (const ModelParams& p : {kParams, ModelParams(0.0, 0.0, 2.0)}) {
    const ScalarField F = initial_field(b, p, spec);
    const ScalarField again = initial_field(b, p, spec);
    CHECK((F.values() - again.values()).abs().maxCoeff() == 0.0);
    CHECK(F.values().minCoeff() > 0.0);
    const ScalarField f = to_perturbation(g, F);
    const Projection which = macro_projection(p);
    VectorXd total = VectorXd::Zero(b.columns(which).cols());
    for (int ix = 0; ix < g.nx; ++ix) total += b.coefficients(which, f.cell(ix));
    CHECK(total.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("decay fit") {
  std::vector<double> t, y;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    y.push_back(3.0 * std::exp(-0.7 * t.back()) * (1.0 + 0.01 * std::sin(5.0 * t.back())));
  }
  const DecayFit fit = fit_decay(t, y);
  CHECK(fit.lambda == doctest::Approx(0.7).epsilon(0.01));
  CHECK(fit.r_squared > 0.999);
  CHECK_FALSE(fit.truncated);
  CHECK(fit.points == 91);

  y.back() = 0.0;
  const DecayFit cut = fit_decay(t, y);
  CHECK(cut.truncated);
  CHECK(cut.points == 90);
}

TEST_CASE("invariant drift measure") {
  Diagnostics d;
  DiagnosticsRow r;
  r.mass = 2.0;
  r.energy = 3.0;
  d.rows.push_back(r);
  r.momentum(1) = 1e-12;
  r.energy = 3.0 + 3e-11;
  d.rows.push_back(r);
  CHECK(invariant_drift(d) == doctest::Approx(1e-11));
}

TEST_CASE("dichotomy sweep rows") {
  ExperimentSpec spec;
  spec.thetas = {0.0, 1e-3, 1.0};
  spec.samples = 5;
  const auto rows = dichotomy_sweep(basis(), 0.0, spec);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].kernel_dim == 6);
  CHECK(rows[1].kernel_dim == 5);
  CHECK(rows[2].kernel_dim == 5);
  CHECK(rows[0].split_norm < 1e-12);
  CHECK(rows[2].split_norm == doctest::Approx(std::sqrt(0.4)).epsilon(1e-6));
  for (const auto& r : rows) CHECK(r.worst_margin >= -1e-10);
}

TEST_CASE("simulate command on an equilibrium config") {
  RunConfig c;
  c.grid = GridSpec{4, 24, 12};
  c.solver.t_end = 0.2;
  const auto dir = std::filesystem::temp_directory_path() / "esbgk_test_simulate";
  std::filesystem::remove_all(dir);
  CHECK(cmd_simulate(c, dir) == 0);
  std::ifstream csv(dir / "diagnostics.csv");
  std::string header, row;
  std::getline(csv, header);
  CHECK(header == Diagnostics::kHeader);
  int rows = 0;
  while (std::getline(csv, row)) {
    ++rows;
    std::stringstream ss(row);
    std::string cell;
    for (int i = 0; i < 8; ++i) std::getline(ss, cell, ',');
    CHECK(std::stod(cell) < 1e-24);  // Enorm
  }
  CHECK(rows > 1);
  CHECK_FALSE(std::filesystem::exists(dir / "failure.json"));
}

TEST_CASE("decay command at zero amplitude") {
  RunConfig c;
  c.grid = GridSpec{4, 16, 12};
  c.initial.amplitude = 0.0;
  const auto dir = std::filesystem::temp_directory_path() / "esbgk_test_decay0";
  std::filesystem::remove_all(dir);
  CHECK(cmd_decay(c, dir) == 0);
  std::ifstream in(dir / "fit.json");
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc["status"] == "already at equilibrium");
}
