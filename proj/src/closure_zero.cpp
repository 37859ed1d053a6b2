#include "qmep/closure_zero.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>

#include "qmep/errors.hpp"

namespace qmep {

namespace {

void require_zeroth(const Multipliers& mult) {
  if (mult.order != Order::Zeroth) throw DomainError("zeroth-order multipliers required");
  if (!(mult.eta1 > 0.0)) throw DomainError("eta1 must be positive");
  if (!std::isfinite(mult.eta0)) throw DomainError("eta0 must be finite");
}

// int e^(-beta x) x^k g(x) dx for k = 0, 1.
std::array<double, 2> boltzmann_integrals(const DispersionModel& model, double beta, const QuadratureSpec& spec) {
  const double xmin = model.reduced_band_minimum();
  auto integrand = [&](double u) {
    const BandPoint k = model.at_u(u);
    const double e = std::exp(-beta * (k.x - xmin)) * k.measure;
    return std::array<double, 2>{e, e * k.x};
  };
  std::vector<double> pts{0.0};
  for (double m : {1.0, 4.0, 16.0}) pts.push_back(model.u_of_x(xmin + m / beta));
  const double x_cut = xmin + spec.truncation_margin / beta;
  const double u_cut = model.u_of_x(x_cut);
  pts.push_back(u_cut);
  const auto body = integrate_piecewise_n<2>(integrand, pts, spec);
  const auto tail =
      integrate_tail_n<2>(integrand, u_cut, model.u_of_x(x_cut + 1.0 / beta) - u_cut, spec, body);
  // Undo the band-minimum offset of the exponent.
  const double back = std::exp(-beta * xmin);
  return {(body.value[0] + tail.value[0]) * back, (body.value[1] + tail.value[1]) * back};
}

double max_abs_rel(double a, double b) { return std::max(std::abs(std::expm1(a)), std::abs(std::expm1(b))); }

}  // namespace

MomentVector constraints_forward(const DispersionModel& model, const Multipliers& mult, const QuadratureSpec& spec) {
  require_zeroth(mult);
  const BandMoments bm = band_moments(model, mult.fermi_state(), spec);
  const double N = model.density_unit();
  MomentVector m;
  m.order = Order::Zeroth;
  m.n = N * bm.occ[0];
  m.W = N * model.thermal_energy() * bm.occ[1];
  const double lambda = N * model.speed2_scale() * bm.fp_v;
  m.J = (-lambda) * mult.eta2;
  m.n_error = std::abs(m.n) * bm.rel_error;
  m.W_error = std::abs(m.W) * bm.rel_error;
  m.J_error = norm(m.J) * bm.rel_error;
  return m;
}

ClosureFluxes closure_fluxes(const DispersionModel& model, const Multipliers& mult, const QuadratureSpec& spec) {
  require_zeroth(mult);
  const BandMoments bm = band_moments(model, mult.fermi_state(), spec);
  const double N = model.density_unit();
  ClosureFluxes c;
  c.S = (-N * model.thermal_energy() * model.speed2_scale() * bm.fp_vx) * mult.eta2;
  c.P = scaled_identity(N * model.speed2_scale() * bm.occ_p, model.dim());
  c.G = scaled_identity(N * model.hessian_scale() * bm.occ_h, model.dim());
  return c;
}

std::array<std::array<double, 2>, 2> jacobian_2x2(const DispersionModel& model, const Multipliers& mult,
                                                  const QuadratureSpec& spec) {
  require_zeroth(mult);
  const BandMoments bm = band_moments(model, mult.fermi_state(), spec);
  const double N = model.density_unit();
  return {{{-N * bm.fp[0], -N * bm.fp[1]}, {-N * bm.fp[1], -N * bm.fp[2]}}};
}

double drift_coefficient(const DispersionModel& model, const FermiState& st, const QuadratureSpec& spec) {
  const int d = model.dim();
  auto kernel = [d](const BandSample& s) { return std::array<double, 1>{s.fp * s.k.measure * s.k.speed2 / d}; };
  const auto r = band_integrate<1>(model, st, spec, kernel);
  return model.density_unit() * model.speed2_scale() * r.value[0];
}

double fermi_sea_energy(const DispersionModel& model, double n, const QuadratureSpec& spec) {
  if (!(n > 0.0)) throw DomainError("density must be positive");
  const double count = n / model.density_unit();
  const double kT = model.thermal_energy();
  if (model.kind() == BandKind::Graphene) {
    const double xc = model.reduced_gap();
    const double xf = std::sqrt(xc * xc + 2.0 * count);
    return model.density_unit() * kT * (xf * xf * xf - xc * xc * xc) / 3.0;
  }
  // int_0^xF g dx = (2 sqrt 2 / 3) z^(3/2) with z = x (1 + a x).
  const double a = model.reduced_alpha();
  const double z = std::pow(3.0 * count / (2.0 * std::sqrt(2.0)), 2.0 / 3.0);
  const double xf = 2.0 * z / (1.0 + std::sqrt(1.0 + 4.0 * a * z));
  const std::array<double, 2> pts{0.0, model.u_of_x(xf)};
  auto integrand = [&](double u) {
    const BandPoint k = model.at_u(u);
    return std::array<double, 1>{k.x * k.measure};
  };
  const auto r = integrate_piecewise_n<1>(integrand, pts, spec);
  return model.density_unit() * kT * r.value[0];
}

double compatibility_bound(const DispersionModel& model) { return 1.0 / model.speed_bound(); }

Multipliers maxwell_boltzmann_guess(const DispersionModel& model, double n, double W, const QuadratureSpec& spec) {
  const double target = W / (model.thermal_energy() * n);
  auto mean_energy = [&](double log_beta) {
    const auto I = boltzmann_integrals(model, std::exp(log_beta), spec);
    return I[1] / I[0] - target;
  };
  // Equipartition start, then widen the bracket until it straddles the root.
  const double xmin = model.reduced_band_minimum();
  const double excess = std::max(target - xmin, 1e-12);
  double lo = std::log(0.5 * model.dim() / std::max(target, 1e-300)) - 1.0;
  double hi = std::log(0.5 * model.dim() / excess) + 1.0;
  if (hi <= lo) hi = lo + 2.0;
  double f_lo = mean_energy(lo);
  double f_hi = mean_energy(hi);
  for (int i = 0; i < 60 && f_lo < 0.0; ++i) f_lo = mean_energy(lo -= 2.0);
  for (int i = 0; i < 60 && f_hi > 0.0; ++i) f_hi = mean_energy(hi += 2.0);
  if (f_lo < 0.0 || f_hi > 0.0) throw DomainError("mean energy outside the range of Boltzmann states");

  boost::uintmax_t iters = 100;
  const auto tol = boost::math::tools::eps_tolerance<double>(40);
  const auto root = boost::math::tools::toms748_solve(mean_energy, lo, hi, f_lo, f_hi, tol, iters);
  const double beta = std::exp(0.5 * (root.first + root.second));

  const auto I = boltzmann_integrals(model, beta, spec);
  Multipliers m;
  m.eta1 = beta;
  m.eta0 = std::log(model.density_unit() * I[0] / n);
  return m;
}

InversionResult invert_constraints(const DispersionModel& model, const MomentVector& target,
                                   const std::optional<Multipliers>& guess, const QuadratureSpec& spec,
                                   const InversionOptions& opts) {
  if (target.order != Order::Zeroth) throw DomainError("zeroth-order moments required");
  if (!(target.n > 0.0) || !(target.W > 0.0) || !std::isfinite(target.n) || !std::isfinite(target.W))
    throw DomainError("target n and W must be positive and finite");
  for (double c : target.J)
    if (!std::isfinite(c)) throw DomainError("target J must be finite");
  const double w_min = fermi_sea_energy(model, target.n, spec);
  if (!(target.W > w_min * (1.0 + 1e-10)))
    throw DomainError("unrealizable moments: W is at or below the degenerate (Fermi sea) energy for this n");

  Multipliers cur = guess.value_or(maxwell_boltzmann_guess(model, target.n, target.W, spec));
  cur.order = Order::Zeroth;
  cur.eta2 = Vec{};
  if (!(cur.eta1 > 0.0) || !std::isfinite(cur.eta0)) cur = maxwell_boltzmann_guess(model, target.n, target.W, spec);

  const double N = model.density_unit();
  const double kT = model.thermal_energy();
  const double log_n = std::log(target.n);
  const double log_w = std::log(target.W / kT);

  struct Eval {
    double rn, rw;
    BandMoments bm;
  };
  auto evaluate = [&](const Multipliers& m) {
    Eval e;
    e.bm = band_moments(model, m.fermi_state(), spec);
    e.rn = std::log(N * e.bm.occ[0]) - log_n;
    e.rw = std::log(N * e.bm.occ[1]) - log_w;
    return e;
  };

  Eval ev = evaluate(cur);
  double step_norm = std::numeric_limits<double>::infinity();
  InversionResult res;
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const double resid = max_abs_rel(ev.rn, ev.rw);
    if (resid < opts.residual_tol && step_norm < opts.step_tol) {
      res.iterations = it;
      res.residual = resid;
      break;
    }
    if (it == opts.max_iterations)
      throw ConvergenceError("Newton inversion did not converge", resid, step_norm);

    // Jacobian of the log residuals in (eta0, log eta1).
    const double n_red = ev.bm.occ[0];
    const double w_red = ev.bm.occ[1];
    const double a = -ev.bm.fp[0] / n_red;
    const double b = -ev.bm.fp[1] * cur.eta1 / n_red;
    const double c = -ev.bm.fp[1] / w_red;
    const double d = -ev.bm.fp[2] * cur.eta1 / w_red;
    const double det = a * d - b * c;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) throw ConditioningError("singular inversion Jacobian");
    const double d0 = -(d * ev.rn - b * ev.rw) / det;
    const double d1 = -(-c * ev.rn + a * ev.rw) / det;

    double scale = 1.0;
    const double r0 = std::max(std::abs(ev.rn), std::abs(ev.rw));
    Multipliers trial = cur;
    Eval ev_trial{std::nan(""), std::nan(""), {}};
    for (int h = 0;; ++h) {
      trial.eta0 = cur.eta0 + scale * d0;
      trial.eta1 = cur.eta1 * std::exp(scale * d1);
      bool ok = std::isfinite(trial.eta0) && std::isfinite(trial.eta1) && trial.eta1 > 0.0;
      if (ok) {
        try {
          ev_trial = evaluate(trial);
          ok = std::isfinite(ev_trial.rn) && std::isfinite(ev_trial.rw) &&
               std::max(std::abs(ev_trial.rn), std::abs(ev_trial.rw)) <= r0 * (1.0 - 1e-4 * scale) + 1e-13;
        } catch (const ConvergenceError&) {
          ok = false;
        }
      }
      if (ok || h >= opts.max_halvings) {
        if (!ok && !(std::isfinite(ev_trial.rn) && trial.eta1 > 0.0))
          throw ConvergenceError("Newton inversion left the admissible region", r0, step_norm);
        break;
      }
      scale *= 0.5;
    }
    step_norm = std::hypot(scale * d0, scale * d1);
    cur = trial;
    ev = ev_trial;
  }

  // eta2 from the linear current relation.
  const double lambda = N * model.speed2_scale() * ev.bm.fp_v;
  cur.eta2 = (-1.0 / lambda) * target.J;
  res.mult = cur;
  res.compatible = norm(cur.eta2) * model.speed_bound() <= 1.0 || norm(cur.eta2) == 0.0;
  return res;
}

}  // namespace qmep
