#pragma once

// hbar^2 corrections of the maximum-entropy closure.
//
// Second-order quantities are stored as the coefficients of hbar^2 in SI
// units; the physical correction is (hbar_scale * hbar)^2 times the stored
// value (see second_order_weight). The multiplier gradient enters through
//   w2,0 = -f'(xi0) xi2 + c1(xi0) A + c2(xi0) B
// with f' = e^xi / (e^xi + 1)^2, c1 = -f' tanh(xi/2) / 8,
// c2 = f' (e^2xi - 4e^xi + 1) / (24 (e^xi + 1)^2), and for a profile along x_1
//   A = X'' eta1 H_11 - eta1'^2 v_1^2
//   B = X'' eta1^2 v_1^2 - 2 eta1 eta1' X' v_1^2 + eta1 H_11 X'^2
// where X = eta0 + eta1 eps and H = grad_p v. Only the zeroth order in the
// anisotropy eta2 is kept in the gradient part.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qmep/closure_zero.hpp"
#include "qmep/dispersion.hpp"
#include "qmep/quadrature.hpp"

namespace qmep {

/// Value and first two x-derivatives (1/m, 1/m^2) of eta0 and the reduced eta1.
struct MultiplierJet {
  double eta0 = 0.0;
  double d_eta0 = 0.0;
  double dd_eta0 = 0.0;
  double eta1 = 1.0;
  double d_eta1 = 0.0;
  double dd_eta1 = 0.0;
};

enum class Boundary { Periodic, OneSidedExtrapolation };

/// Zeroth-order multipliers sampled on a uniform grid along x_1.
struct MultiplierField1D {
  std::vector<double> x;
  std::vector<double> eta0;
  std::vector<double> eta1;
  std::vector<Vec> eta2;
  Boundary boundary = Boundary::OneSidedExtrapolation;

  /// Throws DomainError unless the grid is strictly increasing, uniform to
  /// 1e-12 relative, and every array has the same length of at least 5.
  void validate() const;
  double spacing() const;
  std::size_t size() const { return x.size(); }

  /// Reads a CSV with a header row naming the columns x, eta0, eta1 and
  /// eta2_0[, eta2_1[, eta2_2]]; lines starting with '#' are skipped.
  static MultiplierField1D load_csv(const std::string& path, Boundary boundary);
};

/// Derivative estimates at one grid point: the fourth-order stencils used for
/// the closure and the second-order ones used to judge them.
struct StencilDerivatives {
  MultiplierJet jet;
  MultiplierJet low_order;
};
StencilDerivatives field_jet(const MultiplierField1D& field, std::size_t index);

/// The two bracket coefficients (c1, c2) at xi, unscaled.
std::array<double, 2> w2_coefficients(double xi);

/// Pointwise w2,0 at momentum p for a profile along x_1. xi2 is the
/// second-order exponent (eta0^(2) + eta1^(2) eps + eta2^(2).v) in SI.
double w2_pointwise(const DispersionModel& model, const MultiplierJet& jet, double xi2, const Vec& p);

struct SecondOrderRHS {
  double psi_n = 0.0;
  double psi_W = 0.0;
  Vec psi_J{};
  /// Relative change of (psi_n, psi_W) when the derivatives are taken with
  /// second-order stencils instead; an upper estimate of the stencil error.
  double fd_error_estimate = 0.0;
  bool accuracy_warning = false;
};

/// Moments y int (1, eps, v) Psi dp of the gradient part of w2,0 for given derivatives.
SecondOrderRHS psi_from_jet(const DispersionModel& model, const MultiplierJet& jet, const QuadratureSpec& spec = {});

/// Same at grid point x_index of a field, derivatives by finite differences.
SecondOrderRHS psi_moments(const DispersionModel& model, const MultiplierField1D& field, std::size_t x_index,
                           const QuadratureSpec& spec = {}, double fd_tolerance = 1e-3);

/// y int Psi grad_p v dp (d x d, x_1 along the profile). Divergent for a
/// gapless cone with non-zero gradients, which is reported as DomainError.
Mat psi_velocity_gradient(const DispersionModel& model, const MultiplierJet& jet, const QuadratureSpec& spec = {});

/// Matrix of the (eta0^(2), eta1^(2)) system, equal to -jacobian_2x2(mult0).
std::array<std::array<double, 2>, 2> second_order_matrix(const DispersionModel& model, const Multipliers& mult0,
                                                         const QuadratureSpec& spec = {});

/// Solves the linear second-order constraints for eta^(2) (eta1 reduced).
Multipliers invert_second_order(const DispersionModel& model, const Multipliers& mult0, const MomentVector& target2,
                                const SecondOrderRHS& rhs, const QuadratureSpec& spec = {});

/// Second-order moments produced by eta^(2) on top of mult0 and the gradient part rhs.
MomentVector second_order_forward(const DispersionModel& model, const Multipliers& mult0, const Multipliers& mult2,
                                  const SecondOrderRHS& rhs, const QuadratureSpec& spec = {});

/// Homogeneous y int w2,0 grad_p v dp = G^(2) I (no gradient part).
double second_order_velocity_gradient(const DispersionModel& model, const Multipliers& mult0,
                                      const Multipliers& mult2, const QuadratureSpec& spec = {});

/// (hbar_scale * hbar)^2, and exactly +0 when hbar_scale is 0.
double second_order_weight(double hbar_scale);

}  // namespace qmep
