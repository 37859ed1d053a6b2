#include "qmep/dispersion.hpp"

#include <cmath>
#include <limits>

#include "qmep/constants.hpp"
#include "qmep/errors.hpp"

namespace qmep {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}

void require_finite(const Vec& p) {
  for (double c : p) require(std::isfinite(c), "momentum must be finite");
}

}  // namespace

DispersionModel DispersionModel::kane(double m_star, double alpha, double T_L, double g_s, double g_v) {
  require(m_star > 0.0 && std::isfinite(m_star), "m_star must be positive");
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be non-negative");
  require(T_L > 0.0 && std::isfinite(T_L), "T_L must be positive");
  require(g_s > 0.0 && g_v > 0.0, "degeneracies must be positive");
  DispersionModel m;
  m.kind_ = alpha > 0.0 ? BandKind::Kane : BandKind::Parabolic;
  m.m_star_ = m_star;
  m.alpha_ = alpha;
  m.T_L_ = T_L;
  m.g_s_ = g_s;
  m.g_v_ = g_v;
  m.dim_ = 3;
  m.y_ = g_s * g_v / std::pow(2.0 * constants::pi * constants::hbar, 3);
  m.kT_ = constants::k_B * T_L;
  return m;
}

DispersionModel DispersionModel::parabolic(double m_star, double T_L, double g_s, double g_v) {
  return kane(m_star, 0.0, T_L, g_s, g_v);
}

DispersionModel DispersionModel::graphene(double v_fermi, double half_gap_c, double T_L, double g_s, double g_v) {
  require(v_fermi > 0.0 && std::isfinite(v_fermi), "v_fermi must be positive");
  require(half_gap_c >= 0.0 && std::isfinite(half_gap_c), "half_gap_c must be non-negative");
  require(T_L > 0.0 && std::isfinite(T_L), "T_L must be positive");
  require(g_s > 0.0 && g_v > 0.0, "degeneracies must be positive");
  DispersionModel m;
  m.kind_ = BandKind::Graphene;
  m.v_fermi_ = v_fermi;
  m.half_gap_c_ = half_gap_c;
  m.T_L_ = T_L;
  m.g_s_ = g_s;
  m.g_v_ = g_v;
  m.dim_ = 2;
  m.y_ = g_s * g_v / std::pow(2.0 * constants::pi * constants::hbar, 2);
  m.kT_ = constants::k_B * T_L;
  return m;
}

double DispersionModel::energy(const Vec& p) const {
  require_finite(p);
  const double p2 = dot(p, p);
  if (kind_ == BandKind::Graphene) return v_fermi_ * std::sqrt(p2 + half_gap_c_ * half_gap_c_);
  // Root of alpha eps^2 + eps - K = 0 written without cancellation; alpha = 0 gives K exactly.
  const double K = p2 / (2.0 * m_star_);
  return 2.0 * K / (1.0 + std::sqrt(1.0 + 4.0 * alpha_ * K));
}

Vec DispersionModel::group_velocity(const Vec& p) const {
  require_finite(p);
  if (kind_ == BandKind::Graphene) {
    const double pt = std::sqrt(dot(p, p) + half_gap_c_ * half_gap_c_);
    if (pt == 0.0) return Vec{};
    return (v_fermi_ / pt) * p;
  }
  const double eps = energy(p);
  return (1.0 / (m_star_ * (1.0 + 2.0 * alpha_ * eps))) * p;
}

Mat DispersionModel::velocity_hessian(const Vec& p) const {
  require_finite(p);
  const BandPoint k = at_x(energy(p) / kT_);
  const double a = hessian_scale() * k.v_over_p;
  const double b = hessian_scale() * k.dv_dp - a;
  Mat h = scaled_identity(a, dim_);
  const double pn = norm(p);
  if (pn > 0.0) {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) h[i][j] += b * p[i] * p[j] / (pn * pn);
  }
  return h;
}

double DispersionModel::speed_bound() const {
  if (kind_ == BandKind::Graphene) return v_fermi_;
  if (alpha_ == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(2.0 * m_star_ * alpha_);
}

double DispersionModel::band_minimum() const {
  return kind_ == BandKind::Graphene ? v_fermi_ * half_gap_c_ : 0.0;
}

double DispersionModel::dos_weight(double eps) const {
  require(std::isfinite(eps), "energy must be finite");
  if (kind_ == BandKind::Graphene) {
    require(eps >= band_minimum(), "energy below the band minimum");
    // d^2p = 2 pi |p| d|p| and |p| d|p| = eps d eps / v_F^2.
    return 2.0 * constants::pi * eps / (v_fermi_ * v_fermi_);
  }
  require(eps >= 0.0, "energy below the band minimum");
  return 4.0 * constants::pi * std::pow(m_star_, 1.5) * (1.0 + 2.0 * alpha_ * eps) *
         std::sqrt(2.0 * eps * (1.0 + alpha_ * eps));
}

double DispersionModel::momentum_at(double eps) const {
  if (kind_ == BandKind::Graphene) {
    require(eps >= band_minimum(), "energy below the band minimum");
    const double pt = eps / v_fermi_;
    return std::sqrt(std::max(0.0, pt * pt - half_gap_c_ * half_gap_c_));
  }
  require(eps >= 0.0, "energy below the band minimum");
  return std::sqrt(2.0 * m_star_ * eps * (1.0 + alpha_ * eps));
}

double DispersionModel::dos_scale() const {
  if (kind_ == BandKind::Graphene) return 2.0 * constants::pi * kT_ / (v_fermi_ * v_fermi_);
  return 4.0 * constants::pi * std::pow(m_star_, 1.5) * std::sqrt(kT_);
}

double DispersionModel::speed2_scale() const {
  if (kind_ == BandKind::Graphene) return v_fermi_ * v_fermi_;
  return kT_ / m_star_;
}

double DispersionModel::hessian_scale() const {
  if (kind_ == BandKind::Graphene) return v_fermi_ * v_fermi_ / kT_;
  return 1.0 / m_star_;
}

double DispersionModel::u_of_x(double x) const {
  if (kind_ == BandKind::Graphene) {
    const double xc = reduced_gap();
    return std::sqrt(std::max(0.0, (x - xc) * (x + xc)));
  }
  return std::sqrt(std::max(0.0, x));
}

BandPoint DispersionModel::at_u(double u) const {
  BandPoint b;
  b.u = u;
  if (kind_ == BandKind::Graphene) {
    const double xc = reduced_gap();
    const double x = std::sqrt(xc * xc + u * u);
    b.x = x;
    b.measure = u;  // x * dx/du with dx/du = u / x
    b.dx_du = x > 0.0 ? u / x : 1.0;
    if (x > 0.0) {
      const double r = u / x;
      b.speed2 = r * r;
      b.v_over_p = 1.0 / x;
      b.dv_dp = xc * xc / (x * x * x);
    } else {
      b.speed2 = 0.0;
      b.v_over_p = 0.0;
      b.dv_dp = 0.0;
    }
    return b;
  }
  const double a = reduced_alpha();
  const double x = u * u;
  const double s = 1.0 + 2.0 * a * x;
  b.x = x;
  b.dx_du = 2.0 * u;
  // (1 + 2ax) sqrt(2x(1+ax)) * 2u with sqrt(x) = u
  b.measure = 2.0 * u * u * s * std::sqrt(2.0 * (1.0 + a * x));
  b.speed2 = 2.0 * x * (1.0 + a * x) / (s * s);
  b.v_over_p = 1.0 / s;
  // 1 - 4ax(1+ax)/s^2 = 1/s^2
  b.dv_dp = 1.0 / (s * s * s);
  return b;
}

AngularMoments angular_moments(int dim) {
  const double d = dim;
  return {1.0 / d, 3.0 / (d * (d + 2.0)), 1.0 / (d * (d + 2.0))};
}

}  // namespace qmep
