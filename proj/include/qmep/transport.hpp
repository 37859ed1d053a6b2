#pragma once

// Homogeneous bulk dynamics under a constant field and the mobility split
// J = n mu E into zeroth and hbar^2 parts.
//
// The carrier charge is -q with q = q_e > 0 (the Hamiltonian is eps - q Phi),
// so the momentum balance reads dJ/dt = -q G E - J / tau and the energy
// balance dW/dt = -q E . J + C_W, with E = -grad Phi.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmep/closure_second.hpp"
#include "qmep/closure_zero.hpp"
#include "qmep/collisions.hpp"
#include "qmep/dispersion.hpp"
#include "qmep/quadrature.hpp"
#include "qmep/vec.hpp"

namespace qmep {

struct BulkState {
  MomentVector moments0;
  /// Coefficients of hbar^2; n and W are held fixed, J relaxes.
  MomentVector moments2{0.0, 0.0, {}, Order::Second};
  Vec field_E{};  ///< V/m
  double time = 0.0;
};

/// One accepted point of a trajectory. J2 is the stored hbar^2 coefficient.
struct TrajectoryRow {
  double t = 0.0;
  double n = 0.0;
  double W = 0.0;
  Vec J{};
  Vec J2{};
  double eta0 = 0.0;
  double eta1 = 1.0;
  Vec eta2{};
  double tau = 0.0;
};

struct RelaxOptions {
  double rel_tol = 1e-9;      ///< local error tolerance of the adaptive stepper
  double steady_tol = 1e-8;   ///< relative rate times time scale at which to stop
  bool stop_at_steady = true;
  bool adaptive = true;       ///< false takes fixed steps of dt
  int max_steps = 200000;
  double hbar_scale = 0.0;    ///< evolve J^(2) when non-zero
  QuadratureSpec quad{};
};

struct RelaxResult {
  std::vector<TrajectoryRow> rows;
  BulkState final_state;
  Multipliers final_mult;
  double final_tau = 0.0;
  bool converged = false;  ///< steady state reached before t_max
  int rejected_steps = 0;
};

/// Raised when the multipliers cannot be recovered along a trajectory.
class TrajectoryError : public std::runtime_error {
public:
  TrajectoryError(const std::string& what, BulkState last_valid)
      : std::runtime_error(what), last_(std::move(last_valid)) {}
  const BulkState& last_valid_state() const noexcept { return last_; }

private:
  BulkState last_;
};

/// Integrates the homogeneous moment equations from initial. dt is the first
/// step (every step when options.adaptive is false). Productions, fluxes and
/// tau are re-evaluated from re-inverted multipliers at every stage.
RelaxResult relax_to_steady(const DispersionModel& model, const std::vector<PhononChannel>& channels,
                            const BulkState& initial, double dt, double t_max, const RelaxOptions& options = {});

/// Right-hand side of the zeroth-order balance laws at one state, with the
/// quantities it was built from.
struct BalanceRates {
  double dW = 0.0;
  Vec dJ{};
  Vec dJ2{};
  Multipliers mult;
  double tau = 0.0;
  double G = 0.0;   ///< y int w0 grad_p v dp = G I
  double G2 = 0.0;  ///< hbar^2 coefficient of the same
};
BalanceRates balance_rates(const DispersionModel& model, const std::vector<PhononChannel>& channels,
                           const BulkState& state, const std::optional<Multipliers>& guess,
                           bool second_order, const QuadratureSpec& spec = {});

struct MobilityResult {
  Mat mu0{};  ///< m^2 / (V s), signed
  Mat mu2{};  ///< coefficient of hbar^2
  double n0 = 0.0;
  double n2 = 0.0;

  /// mu0 + (hbar_scale hbar)^2 mu2, with the second term exactly 0 when hbar_scale is 0.
  Mat total(double hbar_scale) const;
};

/// mu0 = -(tau q / n0) y int w0 grad_p v dp.
MobilityResult mobility_zeroth(const DispersionModel& model, const Multipliers& mult0, double tau,
                               const QuadratureSpec& spec = {});

/// mu2 = -(n2 / n0) mu0 - (tau q / n0) y int w2 grad_p v dp. The gradient
/// part of w2 is included when a multiplier jet is given.
MobilityResult mobility_second(const DispersionModel& model, const Multipliers& mult0, const Multipliers& mult2,
                               double n0, double n2, double tau, const std::optional<MultiplierJet>& gradient = {},
                               const QuadratureSpec& spec = {});

/// Writes rows as CSV (t, n, W, J_*, J2_*, eta0, eta1, eta2_*, tau).
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows, int dim);

}  // namespace qmep
