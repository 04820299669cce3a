#include "esbgk/moments.hpp"

#include <cmath>
#include <string>

#include "esbgk/sym3.hpp"

namespace esbgk {

MacroState macro_state_from_moments(const ModelParams& params, double rho, const Vector3d& momentum,
                                    const Matrix3d& second_moment, double internal_energy) {
  if (!(rho > 0.0))
    throw PhysicalStateError("non-physical cell: density " + std::to_string(rho) + " <= 0");
  const double delta = params.delta();
  const double nu = params.nu();
  const double theta = params.theta();

  MacroState st;
  st.rho = rho;
  st.U = momentum / rho;
  st.Theta = second_moment / rho - st.U * st.U.transpose();
  st.Theta = 0.5 * (st.Theta + st.Theta.transpose()).eval();

  st.E_kin = 0.5 * rho * st.U.squaredNorm();
  st.E_tr = 0.5 * rho * st.Theta.trace();
  st.E_I = internal_energy;
  st.E = st.E_kin + st.E_tr + st.E_I;

  st.T_tr = 2.0 * st.E_tr / (3.0 * rho);
  st.T_I = 2.0 * st.E_I / (delta * rho);
  st.T_delta = 3.0 / (3.0 + delta) * st.T_tr + delta / (3.0 + delta) * st.T_I;
  st.T_theta = theta * st.T_delta + (1.0 - theta) * st.T_I;
  st.tensor_T = theta * st.T_delta * Matrix3d::Identity() +
                (1.0 - theta) * ((1.0 - nu) * st.T_tr * Matrix3d::Identity() + nu * st.Theta);
  st.collision_frequency = rho * st.T_delta / params.frequency_denominator();
  return st;
}

MacroState compute_moments(const PhaseGrid& grid, const ModelParams& params,
                           const Eigen::Ref<const ArrayXd>& cell) {
  const int ni = grid.ni;
  long double m0 = 0, m1[3] = {0, 0, 0}, m2[6] = {0, 0, 0, 0, 0, 0}, e_int = 0;
  for (int iv = 0; iv < grid.velocity_count(); ++iv) {
    const double* f = cell.data() + Eigen::Index(iv) * ni;
    double mass = 0.0, internal = 0.0;
    for (int k = 0; k < ni; ++k) {
      mass += grid.w_i(k) * f[k];
      internal += grid.w_i(k) * grid.s(k) * f[k];
    }
    const double w = grid.w_v(iv);
    const double a = grid.v1(iv), b = grid.v2(iv), c = grid.v3(iv);
    const double wm = w * mass;
    m0 += wm;
    m1[0] += wm * a;
    m1[1] += wm * b;
    m1[2] += wm * c;
    m2[0] += wm * a * a;
    m2[1] += wm * b * b;
    m2[2] += wm * c * c;
    m2[3] += wm * a * b;
    m2[4] += wm * b * c;
    m2[5] += wm * a * c;
    e_int += w * internal;
  }
  const Vector3d momentum{double(m1[0]), double(m1[1]), double(m1[2])};
  Matrix3d second;
  second << double(m2[0]), double(m2[3]), double(m2[5]),
            double(m2[3]), double(m2[1]), double(m2[4]),
            double(m2[5]), double(m2[4]), double(m2[2]);
  return macro_state_from_moments(params, double(m0), momentum, second, double(e_int));
}

double check_tensor_spd(const MacroState& state) {
  if (!state.tensor_T.allFinite() || !std::isfinite(state.T_theta))
    throw PhysicalStateError("temperature tensor has non-finite entries");
  return sym3_eigenvalues<double>(state.tensor_T)(0);
}

}  // namespace esbgk
