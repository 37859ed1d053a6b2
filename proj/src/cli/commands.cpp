#include "qmep/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <omp.h>

#include "qmep/closure_zero.hpp"
#include "qmep/constants.hpp"
#include "qmep/csv.hpp"
#include "qmep/errors.hpp"
#include "qmep/sweep.hpp"
#include "qmep/transport.hpp"

namespace qmep::cli {

namespace {

using constants::eV;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Messages end up in a CSV cell.
std::string cell(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

// A sweep point: the base state with the swept parameter applied.
struct Point {
  double value = nan;  // the swept value, NaN without a sweep
  StateConfig state;
  double coupling_scale = 1.0;
};

std::vector<Point> sweep_points(const RunConfig& rc, const std::vector<std::string>& allowed) {
  if (!rc.sweep) return {Point{nan, rc.state, 1.0}};
  const std::string& p = rc.sweep->parameter;
  bool ok = false;
  for (const auto& a : allowed) ok = ok || a == p;
  if (!ok) throw ConfigError("parameter '" + p + "' cannot be swept by this command");
  std::vector<Point> pts;
  for (double v : rc.sweep->values()) {
    Point pt{v, rc.state, 1.0};
    if (p == "eta0") pt.state.eta0 = v;
    else if (p == "eta1") pt.state.eta1 = v;
    else if (p == "eta2_x") pt.state.eta2_x = v;
    else if (p == "n") pt.state.n = v;
    else if (p == "energy_per_carrier") pt.state.energy_per_carrier = v;
    else if (p == "J_x") pt.state.J_x = v;
    else if (p == "coupling_scale") pt.coupling_scale = v;
    pts.push_back(pt);
  }
  return pts;
}

bool has_multipliers(const StateConfig& s) { return s.eta0.has_value() && s.eta1.has_value(); }
bool has_targets(const StateConfig& s) { return s.n.has_value() && s.energy_per_carrier.has_value(); }

void require_state(const std::vector<Point>& pts) {
  for (const auto& p : pts)
    if (!has_multipliers(p.state) && !has_targets(p.state))
      throw ConfigError("[state] needs eta0 and eta1, or n and energy_per_carrier");
}

MomentVector target_of(const DispersionModel& model, const StateConfig& s, const QuadratureSpec& spec) {
  if (has_targets(s)) {
    MomentVector t;
    t.n = *s.n;
    t.W = *s.n * *s.energy_per_carrier * eV;
    t.J = {s.J_x, 0.0, 0.0};
    return t;
  }
  Multipliers m;
  m.eta0 = *s.eta0;
  m.eta1 = *s.eta1;
  m.eta2 = {s.eta2_x, 0.0, 0.0};
  return constraints_forward(model, m, spec);
}

// Multipliers of a point: given directly, or by inverting its targets.
Multipliers multipliers_of(const DispersionModel& model, const StateConfig& s, const QuadratureSpec& spec) {
  if (has_multipliers(s)) {
    Multipliers m;
    m.eta0 = *s.eta0;
    m.eta1 = *s.eta1;
    m.eta2 = {s.eta2_x, 0.0, 0.0};
    return m;
  }
  return invert_constraints(model, target_of(model, s, spec), std::nullopt, spec).mult;
}

std::vector<PhononChannel> scaled_channels(const std::vector<PhononChannel>& chs, double s) {
  std::vector<PhononChannel> out = chs;
  for (auto& c : out) c.coupling *= s;
  return out;
}

std::string header_start(const RunConfig& rc) {
  std::string h = std::string(csv_schema_line) + "\nindex";
  if (rc.sweep) h += ",sweep_" + rc.sweep->parameter;
  return h;
}

std::string row_start(const RunConfig& rc, std::size_t i, const Point& p) {
  std::string r = std::to_string(i);
  if (rc.sweep) r += "," + csv_number(p.value);
  return r;
}

std::string nums(std::initializer_list<double> vs) {
  std::string s;
  for (double v : vs) s += "," + csv_number(v);
  return s;
}

}  // namespace

CommandResult run_invert(const RunConfig& rc) {
  const DispersionModel model = rc.material.build();
  const auto pts = sweep_points(rc, {"eta0", "eta1", "eta2_x", "n", "energy_per_carrier", "J_x"});
  require_state(pts);

  struct Row {
    MomentVector target;
    std::optional<InversionResult> inv;
    std::string error;
  };
  const auto items = parallel_map<Row>(pts.size(), [&](std::size_t i) {
    Row r;
    r.target = target_of(model, pts[i].state, rc.quadrature);
    try {
      r.inv = invert_constraints(model, r.target, std::nullopt, rc.quadrature);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  });

  CommandResult res;
  res.csv = header_start(rc) + ",n,W,J_x,eta0,eta1,eta2_x,residual,iterations,compatible,status,message\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::string line = row_start(rc, i, pts[i]);
    const auto& it = items[i];
    if (!it.ok() || !it.value->inv) {
      const std::string msg = it.ok() ? it.value->error : it.error;
      const MomentVector t = it.ok() ? it.value->target : MomentVector{nan, nan, {nan, nan, nan}};
      line += nums({t.n, t.W, t.J[0], nan, nan, nan, nan}) + ",0,0,failed," + cell(msg);
      res.exit_code = exit_partial;
      res.messages.push_back("point " + std::to_string(i) + ": " + msg);
    } else {
      const auto& t = it.value->target;
      const auto& inv = *it.value->inv;
      line += nums({t.n, t.W, t.J[0], inv.mult.eta0, inv.mult.eta1, inv.mult.eta2[0], inv.residual}) + "," +
              std::to_string(inv.iterations) + "," + (inv.compatible ? "1" : "0") + ",ok,";
    }
    res.csv += line + "\n";
  }
  return res;
}

CommandResult run_mobility_sweep(const RunConfig& rc) {
  if (rc.channels.empty()) throw ConfigError("mobility needs at least one phonon channel");
  const DispersionModel model = rc.material.build();
  const auto pts = sweep_points(rc, {"eta0", "eta1", "n", "energy_per_carrier", "coupling_scale"});
  require_state(pts);
  const bool second = rc.hbar_scale != 0.0;
  const double weight = second_order_weight(rc.hbar_scale);

  struct Row {
    Multipliers mult;
    double n = 0.0;
    double W = 0.0;
    double tau = 0.0;
    double mu0 = 0.0;
    double mu2 = 0.0;  // hbar^2 term at the configured scale
  };
  const auto items = parallel_map<Row>(pts.size(), [&](std::size_t i) {
    Row r;
    r.mult = multipliers_of(model, pts[i].state, rc.quadrature);
    r.mult.eta2 = Vec{};
    const MomentVector m = constraints_forward(model, r.mult, rc.quadrature);
    r.n = m.n;
    r.W = m.W;
    r.tau = relaxation_time(model, r.mult, scaled_channels(rc.channels, pts[i].coupling_scale), rc.quadrature);
    const MobilityResult mob0 = mobility_zeroth(model, r.mult, r.tau, rc.quadrature);
    r.mu0 = mob0.mu0[0][0];
    if (second) {
      SecondOrderRHS rhs;
      std::optional<MultiplierJet> jet;
      if (rc.gradient) {
        jet = *rc.gradient;
        jet->eta0 = r.mult.eta0;
        jet->eta1 = r.mult.eta1;
        rhs = psi_from_jet(model, *jet, rc.quadrature);
      }
      const MomentVector target2{0.0, 0.0, {}, Order::Second};
      const Multipliers mult2 = invert_second_order(model, r.mult, target2, rhs, rc.quadrature);
      const MobilityResult mob = mobility_second(model, r.mult, mult2, r.n, 0.0, r.tau, jet, rc.quadrature);
      r.mu2 = weight * mob.mu2[0][0];
    }
    return r;
  });

  CommandResult res;
  res.csv = header_start(rc) + ",n,W,eta0,eta1,tau,mu0,mu2,mu_total,abs_mu_total,status,message\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::string line = row_start(rc, i, pts[i]);
    const auto& it = items[i];
    if (!it.ok()) {
      line += nums({nan, nan, nan, nan, nan, nan, nan, nan, nan}) + ",failed," + cell(it.error);
      res.exit_code = exit_partial;
      res.messages.push_back("point " + std::to_string(i) + ": " + it.error);
    } else {
      const Row& r = *it.value;
      const double total = second ? r.mu0 + r.mu2 : r.mu0;
      line += nums({r.n, r.W, r.mult.eta0, r.mult.eta1, r.tau, r.mu0, r.mu2, total, std::abs(total)}) + ",ok,";
    }
    res.csv += line + "\n";
  }
  return res;
}

CommandResult run_relax(const RunConfig& rc) {
  if (rc.sweep) throw ConfigError("relax does not take a [sweep]");
  if (rc.channels.empty()) throw ConfigError("relax needs at least one phonon channel");
  const auto& rx = rc.relax;
  if (rx.dt.has_value() == rx.dt_over_tau.has_value())
    throw ConfigError("[relax] needs exactly one of dt and dt_over_tau");
  if (rx.t_max.has_value() == rx.t_max_over_tau.has_value())
    throw ConfigError("[relax] needs exactly one of t_max and t_max_over_tau");
  require_state({Point{nan, rc.state, 1.0}});

  const DispersionModel model = rc.material.build();
  CommandResult res;
  BulkState init;
  double tau0 = 0.0;
  try {
    init.moments0 = target_of(model, rc.state, rc.quadrature);
    const Multipliers m0 = invert_constraints(model, init.moments0, std::nullopt, rc.quadrature).mult;
    tau0 = relaxation_time(model, m0, rc.channels, rc.quadrature);
  } catch (const std::exception& e) {
    res.csv = std::string(csv_schema_line) + "\n";
    res.exit_code = exit_partial;
    res.messages.push_back(std::string("initial state rejected: ") + e.what());
    return res;
  }
  init.field_E = {rx.field, 0.0, 0.0};
  const double dt = rx.dt ? *rx.dt : *rx.dt_over_tau * tau0;
  const double t_max = rx.t_max ? *rx.t_max : *rx.t_max_over_tau * tau0;
  if (!(dt > 0.0) || !(t_max > 0.0)) throw ConfigError("dt and t_max must be positive");

  RelaxOptions opts;
  opts.adaptive = rx.adaptive;
  opts.stop_at_steady = rx.stop_at_steady;
  opts.rel_tol = rx.rel_tol;
  opts.steady_tol = rx.steady_tol;
  opts.hbar_scale = rc.hbar_scale;
  opts.quad = rc.quadrature;
  if (!rx.adaptive) opts.max_steps = static_cast<int>(std::min(1e9, std::ceil(t_max / dt)));
  try {
    const RelaxResult r = relax_to_steady(model, rc.channels, init, dt, t_max, opts);
    res.csv = trajectory_csv(r.rows, model.dim());
    if (rx.stop_at_steady && !r.converged) {
      res.exit_code = exit_partial;
      res.messages.push_back("steady state not reached by t_max");
    }
  } catch (const TrajectoryError& e) {
    res.csv = std::string(csv_schema_line) + "\n";
    res.exit_code = exit_partial;
    res.messages.push_back(e.what());
  }
  return res;
}

CommandResult run_production_table(const RunConfig& rc) {
  if (rc.channels.empty()) throw ConfigError("production needs at least one phonon channel");
  const DispersionModel model = rc.material.build();
  const auto pts = sweep_points(rc, {"eta0", "eta1", "eta2_x", "n", "energy_per_carrier", "coupling_scale"});
  require_state(pts);
  const std::size_t nch = rc.channels.size();

  struct Row {
    Multipliers mult;
    ProductionVector p;
    double balance = 0.0;  // reduced C_W at eta1 = 1, eta2 = 0
  };
  const auto items = parallel_map<Row>(pts.size() * nch, [&](std::size_t k) {
    const Point& pt = pts[k / nch];
    PhononChannel ch = rc.channels[k % nch];
    ch.coupling *= pt.coupling_scale;
    Row r;
    r.mult = multipliers_of(model, pt.state, rc.quadrature);
    r.p = production(model, r.mult, ch, rc.quadrature);
    Multipliers eq = r.mult;
    eq.eta1 = 1.0;
    eq.eta2 = Vec{};
    r.balance = ch.inelastic() ? production(model, eq, ch, rc.quadrature).reduced_C_W() : 0.0;
    return r;
  });

  CommandResult res;
  res.csv = header_start(rc) + ",channel,eta0,eta1,eta2_x,C_W,C_W_reduced,drag,C_J_x,C_W_detailed_balance,status,message\n";
  for (std::size_t k = 0; k < items.size(); ++k) {
    const std::size_t i = k / nch;
    std::string line = row_start(rc, i, pts[i]) + "," + to_string(rc.channels[k % nch].kind);
    const auto& it = items[k];
    if (!it.ok()) {
      line += nums({nan, nan, nan, nan, nan, nan, nan, nan}) + ",failed," + cell(it.error);
      res.exit_code = exit_partial;
      res.messages.push_back("point " + std::to_string(i) + ": " + it.error);
    } else {
      const Row& r = *it.value;
      line += nums({r.mult.eta0, r.mult.eta1, r.mult.eta2[0], r.p.C_W, r.p.reduced_C_W(), r.p.drag, r.p.C_J[0],
                    r.balance}) +
              ",ok,";
    }
    res.csv += line + "\n";
  }
  return res;
}

int run_invocation(const Invocation& inv, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CommandResult res;
  try {
    rc = load_run_config(inv.config_path);
    if (inv.hbar_scale) rc.hbar_scale = *inv.hbar_scale;
    if (inv.threads) rc.threads = *inv.threads;
    if (inv.output) rc.output_path = *inv.output;
    rc.validate();
    if (rc.threads > 0) omp_set_num_threads(rc.threads);

    if (inv.verb == "invert") res = run_invert(rc);
    else if (inv.verb == "mobility") res = run_mobility_sweep(rc);
    else if (inv.verb == "relax") res = run_relax(rc);
    else if (inv.verb == "production") res = run_production_table(rc);
    else throw ConfigError("unknown command '" + inv.verb + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  }

  for (const auto& m : res.messages) err << m << "\n";
  if (rc.output_path.empty()) {
    out << res.csv;
  } else {
    std::ofstream f(rc.output_path, std::ios::binary);
    if (!f) {
      err << "cannot write '" << rc.output_path << "'\n";
      return exit_config;
    }
    f << res.csv;
  }
  return res.exit_code;
}

}  // namespace qmep::cli
