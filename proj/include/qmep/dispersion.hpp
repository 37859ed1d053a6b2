#pragma once

// Isotropic band models: Kane (non-parabolic), parabolic and gapped graphene.
//
// Internally every energy integral is carried out in the reduced energy
// x = eps / (k_B T_L) and in a momentum-like variable u chosen so that the
// density-of-states measure is smooth at the band edge:
//   Kane / parabolic : x = u^2
//   graphene         : x = sqrt(x_c^2 + u^2),  x_c = v_F c / (k_B T_L)

#include "qmep/vec.hpp"

namespace qmep {

enum class BandKind { Kane, Parabolic, Graphene };

/// Reduced kinematics at one value of the integration variable u. Shapes are
/// dimensionless; the physical quantity is the matching scale times the shape.
struct BandPoint {
  double u = 0.0;
  double x = 0.0;        ///< reduced energy
  double measure = 0.0;  ///< dos shape times dx/du
  double dx_du = 0.0;
  double speed2 = 0.0;   ///< |v|^2 / speed2_scale
  double v_over_p = 0.0; ///< (|v|/|p|) / hessian_scale
  double dv_dp = 0.0;    ///< (d|v|/d|p|) / hessian_scale
};

class DispersionModel {
public:
  /// Kane band eps(1 + alpha eps) = p^2 / 2m*. alpha in 1/J, m_star in kg.
  static DispersionModel kane(double m_star, double alpha, double T_L, double g_s = 2.0, double g_v = 6.0);
  /// Kane band with alpha = 0.
  static DispersionModel parabolic(double m_star, double T_L, double g_s = 2.0, double g_v = 6.0);
  /// Two-dimensional cone eps = v_F sqrt(|p|^2 + c^2), c in kg m/s.
  static DispersionModel graphene(double v_fermi, double half_gap_c, double T_L, double g_s = 2.0,
                                  double g_v = 2.0);

  BandKind kind() const { return kind_; }
  double m_star() const { return m_star_; }
  double alpha() const { return alpha_; }
  double v_fermi() const { return v_fermi_; }
  double half_gap_c() const { return half_gap_c_; }
  double lattice_temperature() const { return T_L_; }
  double g_s() const { return g_s_; }
  double g_v() const { return g_v_; }
  int dim() const { return dim_; }
  /// y = g_s g_v / (2 pi hbar)^d
  double degeneracy_y() const { return y_; }
  /// k_B T_L in J
  double thermal_energy() const { return kT_; }

  double energy(const Vec& p) const;
  Vec group_velocity(const Vec& p) const;
  /// grad_p v = (|v|/|p|) I + (d|v|/d|p| - |v|/|p|) n (x) n, n = p/|p|.
  Mat velocity_hessian(const Vec& p) const;
  /// 1/sqrt(2 m* alpha) for Kane, v_F for graphene, +infinity for a parabolic band.
  double speed_bound() const;
  /// Angularly integrated momentum measure per unit energy: int delta(eps(p) - eps) dp.
  double dos_weight(double eps) const;
  double band_minimum() const;
  /// Magnitude of the momentum at energy eps.
  double momentum_at(double eps) const;

  // Reduced-unit plumbing shared by the integral modules.
  double reduced_alpha() const { return alpha_ * kT_; }
  double reduced_gap() const { return kind_ == BandKind::Graphene ? v_fermi_ * half_gap_c_ / kT_ : 0.0; }
  double reduced_band_minimum() const { return reduced_gap(); }
  /// dos_weight(kT x) = dos_scale * shape(x)
  double dos_scale() const;
  /// |v|^2 = speed2_scale * speed2 shape
  double speed2_scale() const;
  /// |v|/|p| and d|v|/d|p| = hessian_scale * shape
  double hessian_scale() const;
  /// y * kT * dos_scale: the density carried by a unit reduced integral.
  double density_unit() const { return y_ * kT_ * dos_scale(); }

  double u_of_x(double x) const;
  BandPoint at_u(double u) const;
  BandPoint at_x(double x) const { return at_u(u_of_x(x)); }

private:
  BandKind kind_ = BandKind::Parabolic;
  double m_star_ = 0.0;
  double alpha_ = 0.0;
  double v_fermi_ = 0.0;
  double half_gap_c_ = 0.0;
  double T_L_ = 0.0;
  double g_s_ = 0.0;
  double g_v_ = 0.0;
  int dim_ = 3;
  double y_ = 0.0;
  double kT_ = 0.0;
};

/// Angular moments of the unit direction n over the (d-1)-sphere, normalised
/// so that <1> = 1.
struct AngularMoments {
  double n2;    ///< <n_1^2>
  double n4;    ///< <n_1^4>
  double n2n2;  ///< <n_1^2 n_2^2>
};
AngularMoments angular_moments(int dim);

}  // namespace qmep
