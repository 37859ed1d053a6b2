#pragma once

// Electron-phonon production terms evaluated on the zeroth-order MEP state.
// Every channel conserves the carrier number, so C_n is a structural zero,
// and the momentum production is linear in eta2: C_J = drag * eta2 with
// drag > 0 (it opposes J = -lambda eta2).

#include <string>
#include <vector>

#include "qmep/closure_zero.hpp"
#include "qmep/dispersion.hpp"
#include "qmep/quadrature.hpp"

namespace qmep {

enum class PhononKind { SiliconOptical, SiliconElastic, GrapheneAcoustic, GrapheneOptical, GrapheneK };

/// coupling is Lambda (silicon optical), the effective Lambda N_B (silicon
/// elastic), A^(ac) (graphene acoustic) or D^2 in J^2/m^2 (graphene optical
/// and K). sigma is the areal mass density of graphene in kg/m^2.
struct PhononChannel {
  PhononKind kind = PhononKind::SiliconOptical;
  double coupling = 0.0;
  double hbar_omega = 0.0;  ///< J
  double T_L = 300.0;       ///< K
  double sigma = 0.0;       ///< kg/m^2
  double omega = 0.0;       ///< 1/s

  /// Lambda = Z pi (D_t K)^2 / (rho omega); D_t K in J/m, rho in kg/m^3.
  static PhononChannel silicon_optical(double Z, double DtK, double rho, double hbar_omega, double T_L);
  static PhononChannel silicon_elastic(double effective_coupling, double T_L);
  /// A = 2 pi D_ac^2 k_B T_L / (sigma hbar v_ac^2); D_ac in J.
  static PhononChannel graphene_acoustic(double D_ac, double v_ac, double sigma, double T_L);
  static PhononChannel graphene_optical(double D2, double sigma, double hbar_omega, double T_L);
  static PhononChannel graphene_k(double D2, double sigma, double hbar_omega, double T_L);

  /// Throws DomainError for non-positive coupling or temperature, a negative
  /// phonon energy, or an inelastic channel with hbar_omega = 0.
  void validate() const;
  bool inelastic() const;
};

std::string to_string(PhononKind kind);

struct ProductionVector {
  double C_n = 0.0;
  double C_W = 0.0;  ///< J / (m^d s)
  Vec C_J{};
  double drag = 0.0;    ///< C_J = drag * eta2
  double W_unit = 1.0;  ///< C_W / W_unit is the reduced energy production
  double J_unit = 1.0;
  double W_error = 0.0;
  double J_error = 0.0;

  double reduced_C_W() const { return C_W / W_unit; }
};

ProductionVector silicon_optical_production(const DispersionModel& model, const Multipliers& mult,
                                            const PhononChannel& ch, const QuadratureSpec& spec = {});
/// hbar omega -> 0 limit of the optical operator at fixed Lambda N_B.
ProductionVector silicon_elastic_production(const DispersionModel& model, const Multipliers& mult,
                                            const PhononChannel& ch, const QuadratureSpec& spec = {});
ProductionVector graphene_acoustic_production(const DispersionModel& model, const Multipliers& mult,
                                              const PhononChannel& ch, const QuadratureSpec& spec = {});
ProductionVector graphene_optical_production(const DispersionModel& model, const Multipliers& mult,
                                             const PhononChannel& ch, const QuadratureSpec& spec = {});
ProductionVector graphene_k_production(const DispersionModel& model, const Multipliers& mult,
                                       const PhononChannel& ch, const QuadratureSpec& spec = {});

/// Dispatches on ch.kind.
ProductionVector production(const DispersionModel& model, const Multipliers& mult, const PhononChannel& ch,
                            const QuadratureSpec& spec = {});

/// Sum of the productions of several channels.
ProductionVector total_production(const DispersionModel& model, const Multipliers& mult,
                                  const std::vector<PhononChannel>& channels, const QuadratureSpec& spec = {});

/// tau with -J/tau = sum C_J, i.e. lambda / sum(drag). Independent of eta2.
/// Throws DomainError when the summed drag is not positive.
double relaxation_time(const DispersionModel& model, const Multipliers& mult,
                       const std::vector<PhononChannel>& channels, const QuadratureSpec& spec = {});

}  // namespace qmep
