#pragma once

// Zeroth-order maximum-entropy closure: moments of the Fermi-Dirac state
// w0 = 1 / (1 + exp(eta0 + eta1 eps + eta2 . v)) to first order in eta2.

#include <optional>

#include "qmep/band_integral.hpp"
#include "qmep/dispersion.hpp"
#include "qmep/quadrature.hpp"
#include "qmep/vec.hpp"

namespace qmep {

enum class Order { Zeroth, Second };

/// Lagrange multipliers. eta1 is reduced (eta1 = 1 is the lattice
/// temperature); eta2 conjugates the group velocity and is in s/m.
struct Multipliers {
  double eta0 = 0.0;
  double eta1 = 1.0;
  Vec eta2{};
  Order order = Order::Zeroth;

  FermiState fermi_state() const { return {eta0, eta1}; }
};

/// Carrier density (1/m^d), energy density (J/m^d) and current J = y int v w dp.
/// For Order::Second the entries are the coefficients of hbar^2.
struct MomentVector {
  double n = 0.0;
  double W = 0.0;
  Vec J{};
  Order order = Order::Zeroth;
  /// Quadrature error bounds carried along with the values.
  double n_error = 0.0;
  double W_error = 0.0;
  double J_error = 0.0;
};

struct ClosureFluxes {
  Vec S{};  ///< energy flux y int eps v w dp
  Mat P{};  ///< y int v (x) v w dp
  Mat G{};  ///< y int w grad_p v dp
};

/// Options of the (eta0, eta1) Newton solve.
struct InversionOptions {
  int max_iterations = 40;
  int max_halvings = 8;
  double residual_tol = 1e-8;
  double step_tol = 1e-10;
};

struct InversionResult {
  Multipliers mult;
  int iterations = 0;
  double residual = 0.0;   ///< max relative residual of (n, W)
  bool compatible = true;  ///< eta2 within the positivity bound 1/v_inf
};

MomentVector constraints_forward(const DispersionModel& model, const Multipliers& mult,
                                 const QuadratureSpec& spec = {});

ClosureFluxes closure_fluxes(const DispersionModel& model, const Multipliers& mult, const QuadratureSpec& spec = {});

/// d(n, W / k_B T_L) / d(eta0, eta1) with eta1 reduced. Symmetric, negative definite.
std::array<std::array<double, 2>, 2> jacobian_2x2(const DispersionModel& model, const Multipliers& mult,
                                                  const QuadratureSpec& spec = {});

/// lambda > 0 in J = -lambda eta2 (the v (x) v tensor of f' is lambda I).
double drift_coefficient(const DispersionModel& model, const FermiState& st, const QuadratureSpec& spec = {});

/// Energy density of the completely degenerate state holding density n; no
/// Fermi-Dirac state with that density has a smaller energy.
double fermi_sea_energy(const DispersionModel& model, double n, const QuadratureSpec& spec = {});

/// Largest |eta2| keeping 0 <= w0 <= 1 everywhere: 1 / v_inf (0 for a parabolic band).
double compatibility_bound(const DispersionModel& model);

/// Solves constraints_forward(mult) = target. (eta0, eta1) by damped Newton,
/// eta2 afterwards from the linear current relation.
/// Throws DomainError for unrealizable targets and ConvergenceError (with the
/// last relative residual) when Newton stalls.
InversionResult invert_constraints(const DispersionModel& model, const MomentVector& target,
                                   const std::optional<Multipliers>& guess = std::nullopt,
                                   const QuadratureSpec& spec = {}, const InversionOptions& opts = {});

/// Maxwell-Boltzmann starting point for the Newton solve.
Multipliers maxwell_boltzmann_guess(const DispersionModel& model, double n, double W, const QuadratureSpec& spec = {});

}  // namespace qmep
