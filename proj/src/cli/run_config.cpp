#include "qmep/cli/run_config.hpp"

#include <cmath>

#include "qmep/constants.hpp"
#include "qmep/errors.hpp"

namespace qmep::cli {

namespace {

using constants::eV;
using constants::m_e;

PhononChannel channel_from(const ConfigTable& t, double T_default) {
  const std::string kind = t.string("kind");
  const double T_L = t.number_or("T_L", T_default);
  if (kind == "silicon_optical") {
    t.require_only({"kind", "T_L", "Z", "DtK", "rho", "hbar_omega"}, "silicon_optical channel");
    return PhononChannel::silicon_optical(t.number_or("Z", 1.0), t.number("DtK") * eV, t.number("rho"),
                                          t.number("hbar_omega") * eV, T_L);
  }
  if (kind == "silicon_elastic") {
    t.require_only({"kind", "T_L", "coupling"}, "silicon_elastic channel");
    return PhononChannel::silicon_elastic(t.number("coupling"), T_L);
  }
  if (kind == "graphene_acoustic") {
    t.require_only({"kind", "T_L", "D_ac", "v_ac", "sigma"}, "graphene_acoustic channel");
    return PhononChannel::graphene_acoustic(t.number("D_ac") * eV, t.number("v_ac"), t.number("sigma"), T_L);
  }
  if (kind == "graphene_optical" || kind == "graphene_k") {
    t.require_only({"kind", "T_L", "D2", "sigma", "hbar_omega"}, kind + " channel");
    const double D2 = t.number("D2") * eV * eV;
    const double hw = t.number("hbar_omega") * eV;
    return kind == "graphene_optical" ? PhononChannel::graphene_optical(D2, t.number("sigma"), hw, T_L)
                                      : PhononChannel::graphene_k(D2, t.number("sigma"), hw, T_L);
  }
  throw ConfigError("unknown channel kind '" + kind + "'");
}

std::optional<double> optional_number(const ConfigTable& t, const std::string& key) {
  if (!t.has(key)) return std::nullopt;
  return t.number(key);
}

}  // namespace

DispersionModel MaterialConfig::build() const {
  if (kind == BandKind::Graphene) {
    const double c = half_gap * eV / v_fermi;
    return DispersionModel::graphene(v_fermi, c, T_L, g_s, g_v);
  }
  if (kind == BandKind::Parabolic || alpha == 0.0) return DispersionModel::parabolic(m_star * m_e, T_L, g_s, g_v);
  return DispersionModel::kane(m_star * m_e, alpha / eV, T_L, g_s, g_v);
}

std::vector<double> SweepAxis::values() const {
  std::vector<double> v;
  if (count == 1) return {min};
  for (int i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) / (count - 1);
    v.push_back(log ? std::exp(std::log(min) + s * (std::log(max) - std::log(min))) : min + s * (max - min));
  }
  return v;
}

MaterialConfig material_preset(const std::string& name) {
  MaterialConfig m;
  m.preset = name;
  if (name == "silicon-kane") return m;
  if (name == "silicon-parabolic") {
    m.kind = BandKind::Parabolic;
    m.alpha = 0.0;
    return m;
  }
  if (name == "graphene" || name == "graphene-gapped") {
    m.kind = BandKind::Graphene;
    m.g_v = 2.0;
    m.half_gap = name == "graphene" ? 0.0 : 0.01;
    return m;
  }
  throw ConfigError("unknown material preset '" + name + "'");
}

std::vector<PhononChannel> preset_channels(const std::string& name, double T_L) {
  if (name == "silicon-kane" || name == "silicon-parabolic") {
    // The elastic coupling is 1e7 times Lambda N_B of the optical channel,
    // which puts momentum and energy relaxation on comparable time scales.
    return {PhononChannel::silicon_optical(1.0, 11e10 * eV, 2330.0, 0.063 * eV, T_L),
            PhononChannel::silicon_elastic(4.2e-27, T_L)};
  }
  if (name == "graphene" || name == "graphene-gapped") {
    return {PhononChannel::graphene_acoustic(6.8 * eV, 2e4, 7.6e-7, T_L),
            PhononChannel::graphene_optical(1e22 * eV * eV, 7.6e-7, 0.1646 * eV, T_L),
            PhononChannel::graphene_k(1.225e21 * eV * eV, 7.6e-7, 0.124 * eV, T_L)};
  }
  return {};
}

void RunConfig::validate() const {
  try {
    quadrature.validate();
    (void)material.build();
    for (const auto& ch : channels) ch.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (sweep) {
    if (sweep->count < 1) throw ConfigError("sweep count must be at least 1");
    if (sweep->log && !(sweep->min > 0.0 && sweep->max > 0.0)) throw ConfigError("log sweep needs positive bounds");
  }
  if (!std::isfinite(hbar_scale) || hbar_scale < 0.0) throw ConfigError("hbar_scale must be finite and >= 0");
  if (state.eta1 && !(*state.eta1 > 0.0)) throw ConfigError("eta1 must be positive");
  if (state.n && !(*state.n > 0.0)) throw ConfigError("n must be positive");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

RunConfig run_config_from(const ConfigDocument& doc) {
  RunConfig rc;
  doc.root.require_only({"hbar_scale", "output", "threads"}, "top level");
  rc.hbar_scale = doc.root.number_or("hbar_scale", 0.0);
  rc.output_path = doc.root.string_or("output", "");
  rc.threads = static_cast<int>(doc.root.number_or("threads", 0.0));

  for (const auto& [name, t] : doc.tables)
    if (name != "material" && name != "sweep" && name != "quadrature" && name != "state" && name != "gradient" &&
        name != "relax")
      throw ConfigError("unknown table [" + name + "]");
  for (const auto& [name, list] : doc.arrays)
    if (name != "channel") throw ConfigError("unknown table array [[" + name + "]]");

  const ConfigTable* mat = doc.table("material");
  if (!mat) throw ConfigError("missing [material] table");
  mat->require_only({"preset", "band", "m_star", "alpha", "v_fermi", "half_gap", "T_L", "g_s", "g_v"}, "[material]");
  if (mat->has("preset")) {
    rc.material = material_preset(mat->string("preset"));
  } else {
    const std::string band = mat->string("band");
    if (band == "kane") rc.material.kind = BandKind::Kane;
    else if (band == "parabolic") rc.material.kind = BandKind::Parabolic;
    else if (band == "graphene") rc.material = material_preset("graphene"), rc.material.preset.clear();
    else throw ConfigError("unknown band '" + band + "'");
  }
  MaterialConfig& m = rc.material;
  m.m_star = mat->number_or("m_star", m.m_star);
  m.alpha = m.kind == BandKind::Parabolic ? 0.0 : mat->number_or("alpha", m.alpha);
  m.v_fermi = mat->number_or("v_fermi", m.v_fermi);
  m.half_gap = mat->number_or("half_gap", m.half_gap);
  m.T_L = mat->number_or("T_L", m.T_L);
  m.g_s = mat->number_or("g_s", m.g_s);
  m.g_v = mat->number_or("g_v", m.g_v);

  const auto ch = doc.arrays.find("channel");
  if (ch != doc.arrays.end()) {
    for (const auto& t : ch->second) rc.channels.push_back(channel_from(t, m.T_L));
  } else {
    rc.channels = preset_channels(m.preset, m.T_L);
  }

  if (const ConfigTable* s = doc.table("sweep")) {
    s->require_only({"parameter", "min", "max", "count", "scale"}, "[sweep]");
    SweepAxis a;
    a.parameter = s->string("parameter");
    a.min = s->number("min");
    a.max = s->number_or("max", a.min);
    const double count = s->number_or("count", 1.0);
    if (count != std::floor(count)) throw ConfigError("sweep count must be an integer");
    a.count = static_cast<int>(count);
    const std::string scale = s->string_or("scale", "linear");
    if (scale != "linear" && scale != "log") throw ConfigError("sweep scale must be linear or log");
    a.log = scale == "log";
    rc.sweep = a;
  }

  if (const ConfigTable* q = doc.table("quadrature")) {
    q->require_only({"rel_tol", "abs_tol", "max_subdivisions", "truncation_margin"}, "[quadrature]");
    rc.quadrature.rel_tol = q->number_or("rel_tol", rc.quadrature.rel_tol);
    rc.quadrature.abs_tol = q->number_or("abs_tol", rc.quadrature.abs_tol);
    rc.quadrature.max_subdivisions = static_cast<int>(q->number_or("max_subdivisions", rc.quadrature.max_subdivisions));
    rc.quadrature.truncation_margin = q->number_or("truncation_margin", rc.quadrature.truncation_margin);
  }

  if (const ConfigTable* s = doc.table("state")) {
    s->require_only({"eta0", "eta1", "eta2_x", "n", "energy_per_carrier", "J_x"}, "[state]");
    rc.state.eta0 = optional_number(*s, "eta0");
    rc.state.eta1 = optional_number(*s, "eta1");
    rc.state.eta2_x = s->number_or("eta2_x", 0.0);
    rc.state.n = optional_number(*s, "n");
    rc.state.energy_per_carrier = optional_number(*s, "energy_per_carrier");
    rc.state.J_x = s->number_or("J_x", 0.0);
  }

  if (const ConfigTable* g = doc.table("gradient")) {
    g->require_only({"d_eta0", "dd_eta0", "d_eta1", "dd_eta1"}, "[gradient]");
    MultiplierJet j;
    j.d_eta0 = g->number_or("d_eta0", 0.0);
    j.dd_eta0 = g->number_or("dd_eta0", 0.0);
    j.d_eta1 = g->number_or("d_eta1", 0.0);
    j.dd_eta1 = g->number_or("dd_eta1", 0.0);
    rc.gradient = j;
  }

  if (const ConfigTable* r = doc.table("relax")) {
    r->require_only({"field", "dt", "t_max", "dt_over_tau", "t_max_over_tau", "adaptive", "stop_at_steady", "rel_tol",
                     "steady_tol"},
                    "[relax]");
    rc.relax.field = r->number_or("field", 0.0);
    rc.relax.dt = optional_number(*r, "dt");
    rc.relax.t_max = optional_number(*r, "t_max");
    rc.relax.dt_over_tau = optional_number(*r, "dt_over_tau");
    rc.relax.t_max_over_tau = optional_number(*r, "t_max_over_tau");
    rc.relax.adaptive = r->boolean_or("adaptive", true);
    rc.relax.stop_at_steady = r->boolean_or("stop_at_steady", true);
    rc.relax.rel_tol = r->number_or("rel_tol", rc.relax.rel_tol);
    rc.relax.steady_tol = r->number_or("steady_tol", rc.relax.steady_tol);
  }

  rc.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  try {
    return run_config_from(load_config(path));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace qmep::cli
