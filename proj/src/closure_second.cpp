#include "qmep/closure_second.hpp"

#include <cmath>

#include "qmep/band_integral.hpp"
#include "qmep/constants.hpp"
#include "qmep/errors.hpp"

namespace qmep {

namespace {

void require_zeroth(const Multipliers& m) {
  if (m.order != Order::Zeroth) throw DomainError("zeroth-order multipliers required");
  if (!(m.eta1 > 0.0)) throw DomainError("eta1 must be positive");
}

bool has_gradient(const MultiplierJet& j) {
  return j.d_eta0 != 0.0 || j.dd_eta0 != 0.0 || j.d_eta1 != 0.0 || j.dd_eta1 != 0.0;
}

// Reduced Psi = Psi0 + n_1^2 Psi2 at one band point; the physical value is
// hessian_scale / kT times this. fp is the (scaled) f'(xi).
struct PsiParts {
  double psi0;
  double psi2;
};

PsiParts psi_parts(const MultiplierJet& j, const BandSample& s) {
  const double x = s.k.x;
  const double X1 = j.d_eta0 + j.d_eta1 * x;
  const double X2 = j.dd_eta0 + j.dd_eta1 * x;
  const double sig = logistic(s.xi);
  const double fer = fermi(s.xi);
  const double c1 = -s.fp * std::tanh(0.5 * s.xi) / 8.0;
  const double c2 = s.fp * (sig * sig - 4.0 * sig * fer + fer * fer) / 24.0;
  const double common = c1 * X2 + c2 * X1 * X1;
  const double b = s.k.dv_dp - s.k.v_over_p;
  PsiParts p;
  p.psi0 = j.eta1 * s.k.v_over_p * common;
  p.psi2 = j.eta1 * b * common +
           s.k.speed2 * (-c1 * j.d_eta1 * j.d_eta1 + c2 * (j.eta1 * j.eta1 * X2 - 2.0 * j.eta1 * j.d_eta1 * X1));
  return p;
}

double psi_unit(const DispersionModel& model) { return model.hessian_scale() / model.thermal_energy(); }

}  // namespace

std::array<double, 2> w2_coefficients(double xi) {
  const double fp = fermi_prime(xi);
  const double sig = logistic(xi);
  const double fer = fermi(xi);
  return {-fp * std::tanh(0.5 * xi) / 8.0, fp * (sig * sig - 4.0 * sig * fer + fer * fer) / 24.0};
}

double w2_pointwise(const DispersionModel& model, const MultiplierJet& jet, double xi2, const Vec& p) {
  if (!(jet.eta1 > 0.0)) throw DomainError("eta1 must be positive");
  const double kT = model.thermal_energy();
  const double eps = model.energy(p);
  const Vec v = model.group_velocity(p);
  const Mat H = model.velocity_hessian(p);
  const int d = model.dim();

  // Physical multipliers: eta1 in 1/J.
  const double e1 = jet.eta1 / kT;
  const double e1_x = jet.d_eta1 / kT;
  const double e1_xx = jet.dd_eta1 / kT;
  const double xi = jet.eta0 + e1 * eps;

  // Derivatives of xi0 = eta0(x) + eta1(x) eps(p) for a profile along x_1.
  Mat xi_xx{}, xi_pp{}, xi_xp{};
  Vec xi_x{}, xi_p{};
  xi_xx[0][0] = jet.dd_eta0 + e1_xx * eps;
  xi_x[0] = jet.d_eta0 + e1_x * eps;
  for (int i = 0; i < d; ++i) {
    xi_p[i] = e1 * v[i];
    xi_xp[0][i] = e1_x * v[i];
    for (int j = 0; j < d; ++j) xi_pp[i][j] = e1 * H[i][j];
  }

  double A = 0.0, B = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      A += xi_xx[i][j] * xi_pp[i][j] - xi_xp[i][j] * xi_xp[j][i];
      B += xi_xx[i][j] * xi_p[i] * xi_p[j] - 2.0 * xi_xp[i][j] * xi_p[i] * xi_x[j] + xi_pp[i][j] * xi_x[i] * xi_x[j];
    }
  const auto c = w2_coefficients(xi);
  return -fermi_prime(xi) * xi2 + c[0] * A + c[1] * B;
}

SecondOrderRHS psi_from_jet(const DispersionModel& model, const MultiplierJet& jet, const QuadratureSpec& spec) {
  if (!(jet.eta1 > 0.0)) throw DomainError("eta1 must be positive");
  SecondOrderRHS rhs;
  if (!has_gradient(jet)) return rhs;
  const double inv_d = 1.0 / model.dim();
  auto kernel = [&](const BandSample& s) {
    const PsiParts p = psi_parts(jet, s);
    const double avg = (p.psi0 + p.psi2 * inv_d) * s.k.measure;
    return std::array<double, 2>{avg, s.k.x * avg};
  };
  const auto r = band_integrate<2>(model, {jet.eta0, jet.eta1}, spec, kernel);
  const double scale = model.density_unit() * psi_unit(model);
  rhs.psi_n = scale * r.value[0];
  rhs.psi_W = scale * model.thermal_energy() * r.value[1];
  // Psi is even in the direction of p at this order, so its current vanishes.
  rhs.psi_J = Vec{};
  return rhs;
}

SecondOrderRHS psi_moments(const DispersionModel& model, const MultiplierField1D& field, std::size_t x_index,
                           const QuadratureSpec& spec, double fd_tolerance) {
  field.validate();
  if (x_index >= field.size()) throw DomainError("x_index outside the grid");
  const StencilDerivatives sd = field_jet(field, x_index);
  SecondOrderRHS rhs = psi_from_jet(model, sd.jet, spec);
  const SecondOrderRHS coarse = psi_from_jet(model, sd.low_order, spec);
  auto rel = [](double fine, double rough) {
    const double diff = std::abs(fine - rough);
    if (diff == 0.0) return 0.0;
    return diff / std::max(std::abs(fine), std::abs(rough));
  };
  rhs.fd_error_estimate = std::max(rel(rhs.psi_n, coarse.psi_n), rel(rhs.psi_W, coarse.psi_W));
  rhs.accuracy_warning = rhs.fd_error_estimate > fd_tolerance;
  return rhs;
}

Mat psi_velocity_gradient(const DispersionModel& model, const MultiplierJet& jet, const QuadratureSpec& spec) {
  if (!(jet.eta1 > 0.0)) throw DomainError("eta1 must be positive");
  const int d = model.dim();
  if (!has_gradient(jet)) return Mat{};
  if (model.kind() == BandKind::Graphene && model.reduced_gap() == 0.0)
    throw DomainError("gradient correction to grad_p v diverges at the apex of a gapless cone");
  const AngularMoments am = angular_moments(d);
  auto kernel = [&](const BandSample& s) {
    const PsiParts p = psi_parts(jet, s);
    const double a = s.k.v_over_p;
    const double b = s.k.dv_dp - a;
    const double m = s.k.measure;
    const double common = p.psi0 * (a + b * am.n2);
    return std::array<double, 2>{(common + p.psi2 * (a * am.n2 + b * am.n4)) * m,
                                 (common + p.psi2 * (a * am.n2 + b * am.n2n2)) * m};
  };
  const auto r = band_integrate<2>(model, {jet.eta0, jet.eta1}, spec, kernel);
  const double scale = model.density_unit() * psi_unit(model) * model.hessian_scale();
  Mat g = scaled_identity(scale * r.value[1], d);
  g[0][0] = scale * r.value[0];
  return g;
}

std::array<std::array<double, 2>, 2> second_order_matrix(const DispersionModel& model, const Multipliers& mult0,
                                                         const QuadratureSpec& spec) {
  require_zeroth(mult0);
  const BandMoments bm = band_moments(model, mult0.fermi_state(), spec);
  const double N = model.density_unit();
  return {{{N * bm.fp[0], N * bm.fp[1]}, {N * bm.fp[1], N * bm.fp[2]}}};
}

Multipliers invert_second_order(const DispersionModel& model, const Multipliers& mult0, const MomentVector& target2,
                                const SecondOrderRHS& rhs, const QuadratureSpec& spec) {
  require_zeroth(mult0);
  if (target2.order != Order::Second) throw DomainError("second-order target moments required");
  const BandMoments bm = band_moments(model, mult0.fermi_state(), spec);
  const double N = model.density_unit();
  const double kT = model.thermal_energy();
  const double m00 = N * bm.fp[0], m01 = N * bm.fp[1], m11 = N * bm.fp[2];
  const double det = m00 * m11 - m01 * m01;
  if (!(std::abs(det) > 1e-13 * std::abs(m00 * m11))) throw ConditioningError("second-order 2x2 system is singular");
  const double b0 = -target2.n + rhs.psi_n;
  const double b1 = (-target2.W + rhs.psi_W) / kT;

  Multipliers m2;
  m2.order = Order::Second;
  m2.eta0 = (m11 * b0 - m01 * b1) / det;
  m2.eta1 = (m00 * b1 - m01 * b0) / det;
  const double lambda = N * model.speed2_scale() * bm.fp_v;
  if (!(lambda > 0.0)) throw ConditioningError("v (x) v tensor is not positive definite");
  m2.eta2 = (1.0 / lambda) * (rhs.psi_J - target2.J);
  return m2;
}

MomentVector second_order_forward(const DispersionModel& model, const Multipliers& mult0, const Multipliers& mult2,
                                  const SecondOrderRHS& rhs, const QuadratureSpec& spec) {
  require_zeroth(mult0);
  if (mult2.order != Order::Second) throw DomainError("second-order multipliers required");
  const BandMoments bm = band_moments(model, mult0.fermi_state(), spec);
  const double N = model.density_unit();
  MomentVector m;
  m.order = Order::Second;
  m.n = -N * (bm.fp[0] * mult2.eta0 + bm.fp[1] * mult2.eta1) + rhs.psi_n;
  m.W = -N * model.thermal_energy() * (bm.fp[1] * mult2.eta0 + bm.fp[2] * mult2.eta1) + rhs.psi_W;
  const double lambda = N * model.speed2_scale() * bm.fp_v;
  m.J = rhs.psi_J - lambda * mult2.eta2;
  m.n_error = std::abs(m.n) * bm.rel_error;
  m.W_error = std::abs(m.W) * bm.rel_error;
  m.J_error = norm(m.J) * bm.rel_error;
  return m;
}

double second_order_velocity_gradient(const DispersionModel& model, const Multipliers& mult0,
                                      const Multipliers& mult2, const QuadratureSpec& spec) {
  require_zeroth(mult0);
  if (mult2.order != Order::Second) throw DomainError("second-order multipliers required");
  const BandMoments bm = band_moments(model, mult0.fermi_state(), spec);
  return -model.density_unit() * model.hessian_scale() * (mult2.eta0 * bm.fp_h[0] + mult2.eta1 * bm.fp_h[1]);
}

double second_order_weight(double hbar_scale) {
  if (hbar_scale == 0.0) return 0.0;
  const double h = hbar_scale * constants::hbar;
  return h * h;
}

}  // namespace qmep
