#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "esbgk/phase_grid.hpp"
#include "esbgk/solver.hpp"

namespace esbgk {

/// Malformed or out-of-range configuration. `key()` names the offending key
/// (empty for pure syntax errors), `line()` is 1-based (0 when not from a file line).
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

private:
  std::string key_;
  int line_;
};

enum class InitialKind { equilibrium, shifted, anisotropic, perturbation };

struct InitialSpec {
  InitialKind kind = InitialKind::equilibrium;
  Vector3d u0 = Vector3d::Zero();        // shifted
  Vector3d theta0 = Vector3d::Ones();    // anisotropic: diagonal of Θ₀
  double t_internal0 = 1.0;              // anisotropic: T_I of the initial state
  double amplitude = 1e-3;               // perturbation
  std::uint64_t seed = 7;                // perturbation
  std::vector<int> modes = {1};          // perturbation: Fourier modes k in cos(2πkx/L + φ)
};

struct ExperimentSpec {
  std::vector<double> thetas = {0.0, 1e-3, 1e-2, 0.1, 1.0};
  std::vector<double> nus = {-0.45, 0.0, 0.5, 0.9};
  int samples = 200;
  std::uint64_t seed = 20240601;
};

/// Everything a CLI run needs. Defaults: ν = 0.5, θ = 0.5, δ = 2.
struct RunConfig {
  double nu = 0.5, theta = 0.5, delta = 2.0;
  GridSpec grid;
  SolverConfig solver;
  InitialSpec initial;
  ExperimentSpec experiment;
  std::string output_dir = "out";

  ModelParams params() const { return ModelParams(nu, theta, delta); }
};

/// Flat TOML-style text: `[section]` headers, `key = value` lines, `#` comments.
/// Values are numbers, "strings", true/false or [lists]. Keys may also be
/// written fully dotted (`model.nu = 0.5`).
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError naming the key of the first out-of-range value.
void validate_config(const RunConfig& config);

std::string to_string(InitialKind kind);
std::string to_string(Limiter limiter);

}  // namespace esbgk
