#include <doctest.h>

#include <cmath>

#include "esbgk/experiments.hpp"
#include "esbgk/maxwellian.hpp"
#include "oracles.hpp"

using namespace esbgk;

namespace {
const ModelParams kParams(0.5, 0.5, 2.0);
const PhaseGrid& grid() {
  static const PhaseGrid g = build_grid(kParams, GridSpec{1, 24, 32});
  return g;
}
// m as a product G(v) H(I)
SeparableDensity separable_m(const PhaseGrid& g) {
  const double norm = oracle::lambda_delta(g.delta) * std::pow(2.0 * std::numbers::pi, -1.5);
  return SeparableDensity{norm * (-0.5 * g.v_sq).exp(), (-g.s).exp()};
}
}  // namespace

TEST_CASE("ellipsoidal Maxwellian of m is m") {
  const PhaseGrid& g = grid();
  const ArrayXd m = global_maxwellian(g);
  for (auto [nu, theta] : {std::pair{0.5, 0.5}, std::pair{0.0, 1.0}, std::pair{-0.4, 0.0}}) {
    const ModelParams p(nu, theta, 2.0);
    const ArrayXd M = ellipsoidal_maxwellian(g, p, compute_moments(g, p, m)).expand(g);
    CHECK((M - m).abs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("ellipsoidal Maxwellian rejects a non-SPD tensor") {
  MacroState st;
  st.rho = 1.0;
  st.T_theta = 1.0;
  st.tensor_T = Vector3d(1.0, -0.1, 1.0).asDiagonal();
  CHECK_THROWS_AS(ellipsoidal_maxwellian(grid(), kParams, st), PhysicalStateError);
  st.tensor_T = Matrix3d::Identity();
  st.T_theta = 0.0;
  CHECK_THROWS_AS(ellipsoidal_maxwellian(grid(), kParams, st), PhysicalStateError);
}

TEST_CASE("moment match: fixed point and idempotence") {
  const PhaseGrid& g = grid();
  const Matrix3d Theta = Vector3d(1.5, 0.75, 0.75).asDiagonal();
  const ArrayXd F = gaussian_state(g, 1.0, Vector3d(0.1, 0.0, 0.0), Theta, 1.2);
  const MacroState st = compute_moments(g, kParams, F);
  const SeparableDensity raw = ellipsoidal_maxwellian(g, kParams, st);

  const MatchedMaxwellian self = moment_match(g, raw, collision_invariants(g, raw));
  CHECK(std::abs(self.a) < 1e-13);
  CHECK(self.b.norm() < 1e-13);
  CHECK(std::abs(self.c) < 1e-13);

  const MomentTarget target = collision_invariants(g, F);
  const MatchedMaxwellian M = moment_match(g, raw, target);
  const MomentTarget got = collision_invariants(g, M.density.expand(g));
  CHECK(std::abs(got.mass - target.mass) <= 1e-13 * target.mass);
  CHECK((got.momentum - target.momentum).norm() <= 1e-13 * target.mass);
  CHECK(std::abs(got.energy - target.energy) <= 1e-13 * target.energy);
}

TEST_CASE("moment match against the linearized solve") {
  // Mraw = m, target mass 1+η with equal relative energy: tilt is a = ln(1+η), b = c = 0.
  const PhaseGrid& g = grid();
  const ArrayXd m = global_maxwellian(g);
  const SeparableDensity mraw = separable_m(g);
  MomentTarget t = collision_invariants(g, mraw);
  const double eta = 1e-6;
  MomentTarget scaled = t;
  scaled.mass *= 1.0 + eta;
  scaled.energy *= 1.0 + eta;
  const MatchedMaxwellian M = moment_match(g, mraw, scaled);
  CHECK(std::abs(M.a - std::log1p(eta)) < 1e-13);
  CHECK(M.b.norm() < 1e-13);
  CHECK(std::abs(M.c) < 1e-13);

  // Mass only: first-order system J δ = r with J the second-moment matrix of m.
  MomentTarget mass_only = t;
  mass_only.mass *= 1.0 + eta;
  const MatchedMaxwellian N = moment_match(g, mraw, mass_only);
  // With E = ∫m e, Q = ∫m e²: a + E c = η, E a + Q c = 0 (mass 1).
  const double E = t.energy / t.mass;
  ArrayXd e(g.nodes_per_cell());
  for (int iv = 0; iv < g.velocity_count(); ++iv)
    for (int k = 0; k < g.ni; ++k) e(iv * g.ni + k) = 0.5 * g.v_sq(iv) + g.s(k);
  const double Q = inner_product(g, m, e.square()) / t.mass;
  const double c_lin = -eta * E / (Q - E * E);
  const double a_lin = eta - E * c_lin;
  CHECK(std::abs(N.c - c_lin) < 1e-11);
  CHECK(std::abs(N.a - a_lin) < 1e-11);
  CHECK(N.b.norm() < 1e-13);
}

TEST_CASE("moment match reports non-convergence") {
  const PhaseGrid& g = grid();
  const SeparableDensity mraw = separable_m(g);
  MomentTarget t = collision_invariants(g, mraw);
  t.energy = -1.0;  // unreachable
  CHECK_THROWS_AS(moment_match(g, mraw, t, 1e-13, 50), MomentMatchError);
}

TEST_CASE("H functional") {
  const PhaseGrid& g = grid();
  const ArrayXd m = global_maxwellian(g);
  const double Hm = h_functional(g, m);
  const double mass = inner_product(g, m, ArrayXd::Ones(m.size()));
  CHECK(std::abs(h_functional(g, ArrayXd(2.0 * m)) - (2.0 * Hm + 2.0 * std::log(2.0) * mass)) <
        1e-12 * std::abs(Hm));
  // ∫ m ln m = ln(Λ (2π)^{-3/2}) - 3/2 - δ/2 for unit mass
  const double exact = std::log(oracle::lambda_delta(2.0) * std::pow(2.0 * std::numbers::pi, -1.5)) -
                       1.5 - 1.0;
  CHECK(std::abs(Hm - exact) < 1e-10);
  ArrayXd bad = m;
  bad(3) = -1e-30;
  CHECK_THROWS(h_functional(g, bad));
  ArrayXd zero = m;
  zero(0) = 0.0;
  CHECK(std::isfinite(h_functional(g, zero)));
}
