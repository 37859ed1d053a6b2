#include "qmep/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qmep/constants.hpp"
#include "qmep/csv.hpp"
#include "qmep/errors.hpp"
#include "qmep/ode.hpp"

namespace qmep {

namespace {

using constants::q_e;

Mat scaled(const Mat& m, double s) {
  Mat out = m;
  for (auto& row : out)
    for (auto& v : row) v *= s;
  return out;
}

Mat added(const Mat& a, const Mat& b) {
  Mat out = a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] += b[i][j];
  return out;
}

// State layout: W, J (3), J2 (3). n is constant and kept outside.
ode::State pack(const BulkState& s) {
  const auto& J = s.moments0.J;
  const auto& J2 = s.moments2.J;
  return {s.moments0.W, J[0], J[1], J[2], J2[0], J2[1], J2[2]};
}

BulkState unpack(const BulkState& like, const ode::State& y, double t) {
  BulkState s = like;
  s.moments0.W = y[0];
  s.moments0.J = {y[1], y[2], y[3]};
  s.moments2.J = {y[4], y[5], y[6]};
  s.time = t;
  return s;
}

ode::State pack_rates(const BalanceRates& r) {
  return {r.dW, r.dJ[0], r.dJ[1], r.dJ[2], r.dJ2[0], r.dJ2[1], r.dJ2[2]};
}

TrajectoryRow make_row(const BulkState& s, const BalanceRates& r) {
  return {s.time, s.moments0.n, s.moments0.W, s.moments0.J, s.moments2.J,
          r.mult.eta0, r.mult.eta1, r.mult.eta2, r.tau};
}

}  // namespace

BalanceRates balance_rates(const DispersionModel& model, const std::vector<PhononChannel>& channels,
                           const BulkState& state, const std::optional<Multipliers>& guess, bool second_order,
                           const QuadratureSpec& spec) {
  if (channels.empty()) throw DomainError("at least one phonon channel is required");
  const InversionResult inv = invert_constraints(model, state.moments0, guess, spec);
  if (!inv.compatible) throw DomainError("current exceeds the compatibility bound of the closure");

  BalanceRates r;
  r.mult = inv.mult;
  const ProductionVector p = total_production(model, r.mult, channels, spec);
  if (!(p.drag > 0.0)) throw DomainError("relaxation time undefined: summed momentum production is not dissipative");
  r.tau = drift_coefficient(model, r.mult.fermi_state(), spec) / p.drag;
  r.G = closure_fluxes(model, r.mult, spec).G[0][0];

  const Vec& E = state.field_E;
  const Vec& J = state.moments0.J;
  r.dW = -q_e * dot(E, J) + p.C_W;
  r.dJ = (-q_e * r.G) * E - (1.0 / r.tau) * J;
  if (second_order) {
    const Multipliers m2 = invert_second_order(model, r.mult, state.moments2, SecondOrderRHS{}, spec);
    r.G2 = second_order_velocity_gradient(model, r.mult, m2, spec);
    r.dJ2 = (-q_e * r.G2) * E - (1.0 / r.tau) * state.moments2.J;
  }
  return r;
}

RelaxResult relax_to_steady(const DispersionModel& model, const std::vector<PhononChannel>& channels,
                            const BulkState& initial, double dt, double t_max, const RelaxOptions& options) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
  if (!(initial.moments0.n > 0.0)) throw DomainError("initial density must be positive");
  if (channels.empty()) throw DomainError("at least one phonon channel is required");

  const bool second = options.hbar_scale != 0.0;
  BulkState current = initial;
  current.moments0.order = Order::Zeroth;
  current.moments2.order = Order::Second;
  if (!second) current.moments2.J = Vec{};

  std::optional<Multipliers> warm;
  BalanceRates last;
  auto rhs = [&](double t, const ode::State& y) {
    last = balance_rates(model, channels, unpack(current, y, t), warm, second, options.quad);
    if (!second) last.dJ2 = Vec{};
    return pack_rates(last);
  };

  RelaxResult result;
  double t = current.time;
  ode::State y = pack(current);
  ode::State k1;
  try {
    k1 = rhs(t, y);
  } catch (const std::exception& e) {
    throw TrajectoryError(std::string("initial state rejected: ") + e.what(), current);
  }
  BalanceRates at = last;
  warm = at.mult;
  result.rows.push_back(make_row(current, at));

  // Reference magnitudes of the current: the steady value tau q G E, or a
  // tiny fraction of n v_thermal when there is no field.
  const double j_floor = 1e-12 * current.moments0.n * std::sqrt(model.speed2_scale());
  auto references = [&](const BalanceRates& b) {
    const double E = norm(current.field_E);
    const double j_ref = std::max({norm(current.moments0.J), b.tau * q_e * std::abs(b.G) * E, j_floor});
    const double j2_ref = std::max({norm(current.moments2.J), b.tau * q_e * std::abs(b.G2) * E,
                                    std::numeric_limits<double>::min()});
    return std::array<double, 3>{std::abs(current.moments0.W), j_ref, j2_ref};
  };
  // Distance to the steady state relative to each reference: for the
  // currents tau |dJ/dt| exactly, for the energy the elapsed time bounds the
  // unknown energy relaxation time once it has passed.
  const double t_start = current.time;
  auto steady_measure = [&](const BalanceRates& b) {
    const auto ref = references(b);
    const double w = std::abs(b.dW) / ref[0] * std::max(current.time - t_start, dt);
    return std::max({w, b.tau * norm(b.dJ) / ref[1], b.tau * norm(b.dJ2) / ref[2]});
  };

  const double t_end = current.time + t_max;
  double h = dt;
  int steps = 0;
  int failures_in_row = 0;
  while (true) {
    if (options.stop_at_steady && steady_measure(at) < options.steady_tol) {
      result.converged = true;
      break;
    }
    if (t >= t_end * (1.0 - 1e-15) || steps >= options.max_steps) break;
    const double step_h = std::min(h, t_end - t);

    ode::Dp45Step st;
    try {
      st = ode::dp45_step(rhs, t, y, k1, step_h);
    } catch (const std::exception& e) {
      ++result.rejected_steps;
      if (++failures_in_row > 40 || step_h < 1e-14 * std::max(std::abs(t), dt))
        throw TrajectoryError(std::string("multiplier inversion failed along the trajectory: ") + e.what(), current);
      h = 0.25 * step_h;
      continue;
    }

    const auto ref = references(at);
    const std::array<double, 7> scale{std::max(std::abs(y[0]), std::abs(st.y[0])),
                                      ref[1], ref[1], ref[1], ref[2], ref[2], ref[2]};
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(st.error[i]) / (options.rel_tol * scale[i]));
    if (options.adaptive && err > 1.0) {
      ++result.rejected_steps;
      h = step_h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    failures_in_row = 0;
    t += step_h;
    y = st.y;
    k1 = st.k_end;
    at = last;
    warm = at.mult;
    current = unpack(current, y, t);
    result.rows.push_back(make_row(current, at));
    ++steps;
    if (options.adaptive) h = step_h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
  }

  result.final_state = current;
  result.final_mult = at.mult;
  result.final_tau = at.tau;
  return result;
}

Mat MobilityResult::total(double hbar_scale) const {
  const double w = second_order_weight(hbar_scale);
  if (w == 0.0) return mu0;
  return added(mu0, scaled(mu2, w));
}

MobilityResult mobility_zeroth(const DispersionModel& model, const Multipliers& mult0, double tau,
                               const QuadratureSpec& spec) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and non-negative");
  if (mult0.order != Order::Zeroth) throw DomainError("zeroth-order multipliers required");
  MobilityResult r;
  r.n0 = constraints_forward(model, mult0, spec).n;
  const Mat G = closure_fluxes(model, mult0, spec).G;
  r.mu0 = scaled(G, -tau * q_e / r.n0);
  return r;
}

MobilityResult mobility_second(const DispersionModel& model, const Multipliers& mult0, const Multipliers& mult2,
                               double n0, double n2, double tau, const std::optional<MultiplierJet>& gradient,
                               const QuadratureSpec& spec) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("tau must be finite and non-negative");
  if (!(n0 > 0.0)) throw DomainError("n0 must be positive");
  if (mult0.order != Order::Zeroth) throw DomainError("zeroth-order multipliers required");
  if (mult2.order != Order::Second) throw DomainError("second-order multipliers required");

  MobilityResult r;
  r.n0 = n0;
  r.n2 = n2;
  const Mat G = closure_fluxes(model, mult0, spec).G;
  r.mu0 = scaled(G, -tau * q_e / n0);

  Mat G2 = scaled_identity(second_order_velocity_gradient(model, mult0, mult2, spec), model.dim());
  if (gradient) {
    MultiplierJet jet = *gradient;
    jet.eta0 = mult0.eta0;
    jet.eta1 = mult0.eta1;
    G2 = added(G2, psi_velocity_gradient(model, jet, spec));
  }
  r.mu2 = added(scaled(r.mu0, -n2 / n0), scaled(G2, -tau * q_e / n0));
  return r;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows, int dim) {
  static const char* axes[] = {"x", "y", "z"};
  std::string out = std::string(csv_schema_line) + "\n";
  out += "t,n,W";
  for (int i = 0; i < dim; ++i) out += std::string(",J_") + axes[i];
  for (int i = 0; i < dim; ++i) out += std::string(",J2_") + axes[i];
  out += ",eta0,eta1";
  for (int i = 0; i < dim; ++i) out += std::string(",eta2_") + axes[i];
  out += ",tau\n";
  for (const auto& r : rows) {
    out += csv_number(r.t) + "," + csv_number(r.n) + "," + csv_number(r.W);
    for (int i = 0; i < dim; ++i) out += "," + csv_number(r.J[i]);
    for (int i = 0; i < dim; ++i) out += "," + csv_number(r.J2[i]);
    out += "," + csv_number(r.eta0) + "," + csv_number(r.eta1);
    for (int i = 0; i < dim; ++i) out += "," + csv_number(r.eta2[i]);
    out += "," + csv_number(r.tau) + "\n";
  }
  return out;
}

}  // namespace qmep
