#pragma once

// Run configuration of the qmep tool. Physical inputs are given in eV, K and
// SI units and converted here.

#include <optional>
#include <string>
#include <vector>

#include "qmep/cli/config.hpp"
#include "qmep/closure_second.hpp"
#include "qmep/collisions.hpp"
#include "qmep/dispersion.hpp"
#include "qmep/quadrature.hpp"

namespace qmep::cli {

struct MaterialConfig {
  std::string preset;
  BandKind kind = BandKind::Kane;
  double m_star = 0.32;     ///< in electron masses
  double alpha = 0.5;       ///< 1/eV
  double v_fermi = 1e6;     ///< m/s
  double half_gap = 0.0;    ///< v_F c in eV
  double T_L = 300.0;       ///< K
  double g_s = 2.0;
  double g_v = 6.0;

  DispersionModel build() const;
};

struct SweepAxis {
  std::string parameter;
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  bool log = false;

  std::vector<double> values() const;
};

/// Base point of a run: multipliers (eta0, eta1, eta2_x in s/m) or moment
/// targets (n in 1/m^d, energy per carrier in eV, J_x in 1/(m^(d-1) s)).
struct StateConfig {
  std::optional<double> eta0;
  std::optional<double> eta1;
  double eta2_x = 0.0;
  std::optional<double> n;
  std::optional<double> energy_per_carrier;
  double J_x = 0.0;
};

struct RelaxConfig {
  double field = 0.0;  ///< V/m along x
  std::optional<double> dt;
  std::optional<double> t_max;
  std::optional<double> dt_over_tau;
  std::optional<double> t_max_over_tau;
  bool adaptive = true;
  bool stop_at_steady = true;
  double rel_tol = 1e-9;
  double steady_tol = 1e-8;
};

struct RunConfig {
  MaterialConfig material;
  std::vector<PhononChannel> channels;
  std::optional<SweepAxis> sweep;
  QuadratureSpec quadrature;
  double hbar_scale = 0.0;
  std::string output_path;
  StateConfig state;
  std::optional<MultiplierJet> gradient;
  RelaxConfig relax;
  int threads = 0;  ///< 0 keeps the OpenMP default

  /// Throws ConfigError on inconsistent or out-of-range settings.
  void validate() const;
};

/// Preset names: silicon-kane, silicon-parabolic, graphene, graphene-gapped.
MaterialConfig material_preset(const std::string& name);
/// Default channels of a preset (empty for an unknown name).
std::vector<PhononChannel> preset_channels(const std::string& name, double T_L);

RunConfig run_config_from(const ConfigDocument& doc);
/// Reads, parses and validates; every failure is a ConfigError.
RunConfig load_run_config(const std::string& path);

}  // namespace qmep::cli
