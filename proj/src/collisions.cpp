#include "qmep/collisions.hpp"

#include <cmath>

#include "qmep/band_integral.hpp"
#include "qmep/constants.hpp"
#include "qmep/errors.hpp"

namespace qmep {

namespace {

using constants::pi;

void require_kane(const DispersionModel& m) {
  if (m.kind() == BandKind::Graphene) throw DomainError("silicon channels need a Kane or parabolic band");
}

void require_graphene(const DispersionModel& m) {
  if (m.kind() != BandKind::Graphene) throw DomainError("graphene channels need a graphene band");
}

void require_zeroth(const Multipliers& m) {
  if (m.order != Order::Zeroth) throw DomainError("productions are evaluated on zeroth-order multipliers");
  if (!(m.eta1 > 0.0)) throw DomainError("eta1 must be positive");
}

// Occupation pieces at xi: f = 1/(1+e^xi) (scaled and plain), s = e^xi/(1+e^xi),
// fp = f s (scaled).
struct Occ {
  double f_s;
  double f;
  double s;
  double fp_s;
};

Occ occupation(const FermiState& st, double xi) {
  return {st.scaled_fermi(xi), fermi(xi), logistic(xi), st.scaled_fermi_prime(xi)};
}

// f_i(e~, e) = f(xi~) s(xi)
double f_i(const Occ& tilde, const Occ& plain) { return tilde.f_s * plain.s; }
// F1(e~, e) = f'(xi) f(xi~)
double F1(const Occ& tilde, const Occ& plain) { return plain.fp_s * tilde.f; }
// F2(e~, e) = s(xi~) f(xi)^2 - f(xi~), using s(xi~) e^(-xi~) = f(xi~)
double F2(const Occ& tilde, const Occ& plain) { return tilde.s * plain.f * plain.f_s - tilde.f_s; }

struct ProductionSums {
  double w;
  double j;
  double w_err;
  double j_err;
};

ProductionVector assemble(const Multipliers& mult, const ProductionSums& r, double W_unit, double J_unit) {
  ProductionVector p;
  p.C_n = 0.0;
  p.W_unit = W_unit;
  p.J_unit = J_unit;
  p.C_W = W_unit * r.w;
  p.drag = J_unit * r.j;
  p.C_J = p.drag * mult.eta2;
  p.W_error = std::abs(W_unit) * r.w_err;
  p.J_error = std::abs(J_unit) * r.j_err;
  return p;
}

// The two energy-exchange terms are integrated as separate components on
// the same nodes and subtracted afterwards, so that at detailed balance the
// difference is exact to rounding while each term still converges.
ProductionSums split_sums(const QuadResultN<3>& r, double xw) {
  return {xw * (r.value[0] - r.value[1]), r.value[2], xw * (r.error[0] + r.error[1]), r.error[2]};
}

struct Inelastic {
  double xw;       // hbar omega / k_B T of the band
  double ratio;    // exp(hbar omega / k_B T_L of the channel)
  double n_b;
};

Inelastic inelastic_params(const DispersionModel& model, const PhononChannel& ch) {
  ch.validate();
  if (!ch.inelastic()) throw DomainError("channel needs a positive phonon energy");
  return {ch.hbar_omega / model.thermal_energy(), std::exp(ch.hbar_omega / (constants::k_B * ch.T_L)),
          bose_occupation(ch.hbar_omega, ch.T_L)};
}

ProductionSums graphene_inelastic_sums(const DispersionModel& model, const Multipliers& mult, const Inelastic& in,
                                       const QuadratureSpec& spec) {
  const FermiState st = mult.fermi_state();
  const double xc2 = model.reduced_gap() * model.reduced_gap();
  const double xw = in.xw;
  auto kernel = [&](const BandSample& s) {
    const double x = s.k.x;
    const double xp = x + xw;
    const Occ lo = occupation(st, s.xi);
    const Occ hi = occupation(st, s.xi + st.eta1 * xw);
    // G(e~, e) = (e~/e)(e^2 - v_F^2 c^2)
    const double u2 = s.k.u * s.k.u;  // x^2 - x_c^2
    const double G_hi_lo = x > 0.0 ? xp * u2 / x : xp * x;
    const double G_lo_hi = x * (xp * xp - xc2) / xp;
    const double w = x * xp * s.k.dx_du;
    const double bj = in.ratio * (F1(hi, lo) * G_hi_lo - F2(hi, lo) * G_lo_hi) +
                      (F1(lo, hi) * G_lo_hi - F2(lo, hi) * G_hi_lo);
    return std::array<double, 3>{w * f_i(lo, hi), w * in.ratio * f_i(hi, lo), bj * s.k.dx_du};
  };
  const FermiEdge fe = fermi_edge(model, st);
  const std::array<double, 1> extra{fe.x_edge - xw};
  const auto r = band_integrate<3>(model, st, spec, kernel, extra);
  return split_sums(r, xw);
}

}  // namespace

PhononChannel PhononChannel::silicon_optical(double Z, double DtK, double rho, double hbar_omega, double T_L) {
  PhononChannel c;
  c.kind = PhononKind::SiliconOptical;
  c.hbar_omega = hbar_omega;
  c.omega = hbar_omega / constants::hbar;
  c.T_L = T_L;
  c.coupling = Z * pi * DtK * DtK / (rho * c.omega);
  return c;
}

PhononChannel PhononChannel::silicon_elastic(double effective_coupling, double T_L) {
  PhononChannel c;
  c.kind = PhononKind::SiliconElastic;
  c.coupling = effective_coupling;
  c.T_L = T_L;
  return c;
}

PhononChannel PhononChannel::graphene_acoustic(double D_ac, double v_ac, double sigma, double T_L) {
  PhononChannel c;
  c.kind = PhononKind::GrapheneAcoustic;
  c.T_L = T_L;
  c.sigma = sigma;
  c.coupling = 2.0 * pi * D_ac * D_ac * constants::k_B * T_L / (sigma * constants::hbar * v_ac * v_ac);
  return c;
}

PhononChannel PhononChannel::graphene_optical(double D2, double sigma, double hbar_omega, double T_L) {
  PhononChannel c;
  c.kind = PhononKind::GrapheneOptical;
  c.coupling = D2;
  c.sigma = sigma;
  c.hbar_omega = hbar_omega;
  c.omega = hbar_omega / constants::hbar;
  c.T_L = T_L;
  return c;
}

PhononChannel PhononChannel::graphene_k(double D2, double sigma, double hbar_omega, double T_L) {
  PhononChannel c = graphene_optical(D2, sigma, hbar_omega, T_L);
  c.kind = PhononKind::GrapheneK;
  return c;
}

bool PhononChannel::inelastic() const {
  return kind == PhononKind::SiliconOptical || kind == PhononKind::GrapheneOptical || kind == PhononKind::GrapheneK;
}

void PhononChannel::validate() const {
  if (!(coupling > 0.0) || !std::isfinite(coupling)) throw DomainError("channel coupling must be positive");
  if (!(T_L > 0.0)) throw DomainError("channel T_L must be positive");
  if (!(hbar_omega >= 0.0)) throw DomainError("phonon energy must be non-negative");
  if (inelastic() && !(hbar_omega > 0.0)) throw DomainError("inelastic channel needs hbar_omega > 0");
  if ((kind == PhononKind::GrapheneOptical || kind == PhononKind::GrapheneK) && !(sigma > 0.0 && omega > 0.0))
    throw DomainError("graphene optical channels need sigma > 0 and omega > 0");
}

std::string to_string(PhononKind kind) {
  switch (kind) {
    case PhononKind::SiliconOptical: return "silicon_optical";
    case PhononKind::SiliconElastic: return "silicon_elastic";
    case PhononKind::GrapheneAcoustic: return "graphene_acoustic";
    case PhononKind::GrapheneOptical: return "graphene_optical";
    case PhononKind::GrapheneK: return "graphene_k";
  }
  return "unknown";
}

ProductionVector silicon_optical_production(const DispersionModel& model, const Multipliers& mult,
                                            const PhononChannel& ch, const QuadratureSpec& spec) {
  require_kane(model);
  require_zeroth(mult);
  if (ch.kind != PhononKind::SiliconOptical) throw DomainError("silicon optical channel expected");
  const Inelastic in = inelastic_params(model, ch);
  const FermiState st = mult.fermi_state();
  const double a = model.reduced_alpha();
  const double xw = in.xw;

  // Reduced speed E(x) / sqrt(kT/m*) = sqrt(2x(1+ax)) / (1 + 2ax).
  auto speed = [a](double x) { return std::sqrt(2.0 * x * (1.0 + a * x)) / (1.0 + 2.0 * a * x); };

  auto kernel = [&](const BandSample& s) {
    const double x = s.k.x;
    const double xp = x + xw;
    const Occ lo = occupation(st, s.xi);
    const Occ hi = occupation(st, s.xi + st.eta1 * xw);
    const double g2 = (1.0 + 2.0 * a * x) * (1.0 + 2.0 * a * xp) * std::sqrt(x * xp * (1.0 + a * x) * (1.0 + a * xp));
    const double e_lo = speed(x);
    const double e_hi = speed(xp);
    const double bj = (e_hi * F1(lo, hi) - e_lo * F2(lo, hi)) + in.ratio * (e_lo * F1(hi, lo) - e_hi * F2(hi, lo));
    const double w = g2 * s.k.dx_du;
    return std::array<double, 3>{w * f_i(lo, hi), w * in.ratio * f_i(hi, lo), w * bj};
  };
  const FermiEdge fe = fermi_edge(model, st);
  const std::array<double, 1> extra{fe.x_edge - xw};
  const auto r = band_integrate<3>(model, st, spec, kernel, extra);

  const double y = model.degeneracy_y();
  const double kT = model.thermal_energy();
  const double m3 = std::pow(model.m_star(), 3);
  const double lam_nb = ch.coupling * in.n_b;
  const double W_unit = 4.0 * y * lam_nb * m3 * kT * kT * kT / pi;
  const double J_unit = y * lam_nb * m3 * kT * kT * std::sqrt(kT / model.m_star()) / (3.0 * pi * pi);
  return assemble(mult, split_sums(r, xw), W_unit, J_unit);
}

ProductionVector silicon_elastic_production(const DispersionModel& model, const Multipliers& mult,
                                            const PhononChannel& ch, const QuadratureSpec& spec) {
  require_kane(model);
  require_zeroth(mult);
  if (ch.kind != PhononKind::SiliconElastic) throw DomainError("silicon elastic channel expected");
  ch.validate();
  const double a = model.reduced_alpha();
  // Limit of the optical bracket: both terms reduce to 2 E(x) f(x).
  auto kernel = [&](const BandSample& s) {
    const double x = s.k.x;
    const double s1 = 1.0 + 2.0 * a * x;
    const double z = x * (1.0 + a * x);
    const double speed = std::sqrt(2.0 * z) / s1;
    return std::array<double, 1>{s1 * s1 * z * 2.0 * speed * s.f * s.k.dx_du};
  };
  const auto r = band_integrate<1>(model, mult.fermi_state(), spec, kernel);
  const double y = model.degeneracy_y();
  const double kT = model.thermal_energy();
  const double J_unit = y * ch.coupling * std::pow(model.m_star(), 3) * kT * kT * std::sqrt(kT / model.m_star()) /
                        (3.0 * pi * pi);
  return assemble(mult, {0.0, r.value[0], 0.0, r.error[0]}, 1.0, J_unit);
}

ProductionVector graphene_acoustic_production(const DispersionModel& model, const Multipliers& mult,
                                              const PhononChannel& ch, const QuadratureSpec& spec) {
  require_graphene(model);
  require_zeroth(mult);
  if (ch.kind != PhononKind::GrapheneAcoustic) throw DomainError("graphene acoustic channel expected");
  ch.validate();
  // eps sqrt(eps^2/v_F^2 - c^2) deps = (kT)^3 / v_F * x u dx, and x dx = u du.
  auto kernel = [](const BandSample& s) { return std::array<double, 1>{s.k.u * s.k.u * s.fp}; };
  const auto r = band_integrate<1>(model, mult.fermi_state(), spec, kernel);
  const double y = model.degeneracy_y();
  const double kT = model.thermal_energy();
  const double vf = model.v_fermi();
  const double J_unit = y * ch.coupling * kT * kT * kT / (4.0 * pi * vf * vf * vf);
  return assemble(mult, {0.0, r.value[0], 0.0, r.error[0]}, 1.0, J_unit);
}

ProductionVector graphene_optical_production(const DispersionModel& model, const Multipliers& mult,
                                             const PhononChannel& ch, const QuadratureSpec& spec) {
  require_graphene(model);
  require_zeroth(mult);
  if (ch.kind != PhononKind::GrapheneOptical) throw DomainError("graphene optical channel expected");
  const Inelastic in = inelastic_params(model, ch);
  const auto r = graphene_inelastic_sums(model, mult, in, spec);
  const double y = model.degeneracy_y();
  const double kT = model.thermal_energy();
  const double vf = model.v_fermi();
  const double W_unit = 2.0 * y * ch.coupling * in.n_b * std::pow(kT, 4) / (ch.sigma * ch.omega * std::pow(vf, 4));
  const double J_unit = y * ch.coupling * in.n_b * kT * kT * kT / (4.0 * ch.sigma * ch.omega * pi * vf * vf);
  return assemble(mult, r, W_unit, J_unit);
}

ProductionVector graphene_k_production(const DispersionModel& model, const Multipliers& mult,
                                       const PhononChannel& ch, const QuadratureSpec& spec) {
  require_graphene(model);
  require_zeroth(mult);
  if (ch.kind != PhononKind::GrapheneK) throw DomainError("graphene K channel expected");
  const Inelastic in = inelastic_params(model, ch);
  const auto r = graphene_inelastic_sums(model, mult, in, spec);
  const double y = model.degeneracy_y();
  const double kT = model.thermal_energy();
  const double vf = model.v_fermi();
  const double W_unit = y * ch.coupling * in.n_b * std::pow(kT, 4) / (2.0 * ch.sigma * ch.omega * std::pow(vf, 4));
  const double J_unit = y * ch.coupling * in.n_b * kT * kT * kT / (4.0 * ch.sigma * ch.omega * pi * vf * vf);
  return assemble(mult, r, W_unit, J_unit);
}

ProductionVector production(const DispersionModel& model, const Multipliers& mult, const PhononChannel& ch,
                            const QuadratureSpec& spec) {
  switch (ch.kind) {
    case PhononKind::SiliconOptical: return silicon_optical_production(model, mult, ch, spec);
    case PhononKind::SiliconElastic: return silicon_elastic_production(model, mult, ch, spec);
    case PhononKind::GrapheneAcoustic: return graphene_acoustic_production(model, mult, ch, spec);
    case PhononKind::GrapheneOptical: return graphene_optical_production(model, mult, ch, spec);
    case PhononKind::GrapheneK: return graphene_k_production(model, mult, ch, spec);
  }
  throw DomainError("unknown phonon channel");
}

ProductionVector total_production(const DispersionModel& model, const Multipliers& mult,
                                  const std::vector<PhononChannel>& channels, const QuadratureSpec& spec) {
  ProductionVector sum;
  for (const auto& ch : channels) {
    const ProductionVector p = production(model, mult, ch, spec);
    sum.C_W += p.C_W;
    sum.drag += p.drag;
    sum.W_error += p.W_error;
    sum.J_error += p.J_error;
  }
  sum.C_J = sum.drag * mult.eta2;
  return sum;
}

double relaxation_time(const DispersionModel& model, const Multipliers& mult,
                       const std::vector<PhononChannel>& channels, const QuadratureSpec& spec) {
  if (channels.empty()) throw DomainError("relaxation time needs at least one channel");
  double drag = 0.0;
  for (const auto& ch : channels) drag += production(model, mult, ch, spec).drag;
  if (!(drag > 0.0)) throw DomainError("relaxation time undefined: summed momentum production is not dissipative");
  return drift_coefficient(model, mult.fermi_state(), spec) / drag;
}

}  // namespace qmep
