#pragma once

// Energy integrals over a band weighted by Fermi-Dirac occupations of
// xi = eta0 + eta1 x (eta1 reduced, x = eps / k_B T_L).
//
// Occupations are handed to kernels pre-multiplied by exp(shift) with
// shift = max(eta0, 0), so that Maxwell-Boltzmann states keep full relative
// accuracy; band_integrate removes the factor from the result.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "qmep/dispersion.hpp"
#include "qmep/quadrature.hpp"

namespace qmep {

struct FermiState {
  double eta0;
  double eta1;  ///< reduced, eta1 * k_B T_L
  double shift() const { return std::max(eta0, 0.0); }
  double xi(double x) const { return eta0 + eta1 * x; }
  /// exp(shift) / (1 + e^xi)
  double scaled_fermi(double xi) const {
    const double s = shift();
    if (s == 0.0) return fermi(xi);
    return std::exp(s - xi) * logistic(xi);
  }
  /// exp(shift) e^xi / (1 + e^xi)^2
  double scaled_fermi_prime(double xi) const {
    const double s = shift();
    if (s == 0.0) return fermi_prime(xi);
    const double l = logistic(xi);
    return std::exp(s - xi) * l * l;
  }
};

struct BandSample {
  BandPoint k;
  double xi;
  double f;   ///< scaled occupation
  double fp;  ///< scaled e^xi / (1 + e^xi)^2
};

/// Reduced Fermi edge and window width of a state on a given band.
struct FermiEdge {
  double x_edge;
  double x_width;
};
FermiEdge fermi_edge(const DispersionModel& model, const FermiState& st);

/// Integrates kernel(sample) -> std::array<double, N> over the whole band in
/// the smooth variable u (the kernel must include sample.k.measure where a
/// density-of-states weight is wanted). Extra reduced-energy breakpoints,
/// for example shifted Fermi edges, can be supplied.
template <std::size_t N, class Kernel>
QuadResultN<N> band_integrate(const DispersionModel& model, const FermiState& st, const QuadratureSpec& spec,
                              const Kernel& kernel, std::span<const double> extra_x = {}) {
  if (!(st.eta1 > 0.0)) throw DomainError("eta1 must be positive");
  if (!std::isfinite(st.eta0)) throw DomainError("eta0 must be finite");
  spec.validate();

  const FermiEdge fe = fermi_edge(model, st);
  const double xmin = model.reduced_band_minimum();
  const double x_cut = fe.x_edge + spec.truncation_margin * fe.x_width;

  std::vector<double> pts{0.0};
  auto add_x = [&](double x) {
    if (x > xmin && x < x_cut) pts.push_back(model.u_of_x(x));
  };
  for (double off : {-8.0, -2.0, 0.0, 2.0, 8.0}) add_x(fe.x_edge + off * fe.x_width);
  for (double x : extra_x) {
    add_x(x);
    add_x(x - 2.0 * fe.x_width);
    add_x(x + 2.0 * fe.x_width);
  }
  const double u_cut = model.u_of_x(x_cut);
  pts.push_back(u_cut);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto integrand = [&](double u) {
    BandSample s;
    s.k = model.at_u(u);
    s.xi = st.xi(s.k.x);
    s.f = st.scaled_fermi(s.xi);
    s.fp = st.scaled_fermi_prime(s.xi);
    return kernel(s);
  };

  const QuadResultN<N> body = integrate_piecewise_n<N>(integrand, pts, spec);
  // Decay length of the occupation in u just past the cut.
  const double u_scale = std::max(model.u_of_x(x_cut + fe.x_width) - u_cut, 1e-300);
  const QuadResultN<N> tail = integrate_tail_n<N>(integrand, u_cut, u_scale, spec, body);

  QuadResultN<N> out;
  const double unscale = std::exp(-st.shift());
  for (std::size_t k = 0; k < N; ++k) {
    out.value[k] = (body.value[k] + tail.value[k]) * unscale;
    out.error[k] = (body.error[k] + tail.error[k]) * unscale;
  }
  out.intervals = body.intervals + tail.intervals;
  return out;
}

/// Reduced integrals of the zeroth-order MEP state that every closure and
/// Jacobian is assembled from (all with the dos measure, d the dimension):
///   occ[k]    = int x^k f            k = 0, 1
///   occ_p     = int speed2/d f       (pressure)
///   occ_h     = int trace(dv/dp)/d f (velocity-gradient tensor, in hessian units)
///   fp[k]     = int x^k f'           k = 0, 1, 2
///   fp_v      = int speed2/d f'      (drift coefficient)
///   fp_vx     = int x speed2/d f'    (energy-flux coefficient)
///   fp_h[k]   = int x^k trace/d f'   k = 0, 1
struct BandMoments {
  std::array<double, 2> occ{};
  double occ_p = 0.0;
  double occ_h = 0.0;
  std::array<double, 3> fp{};
  double fp_v = 0.0;
  double fp_vx = 0.0;
  std::array<double, 2> fp_h{};
  /// Sum of the component error estimates, relative to the matching values.
  double rel_error = 0.0;
};

BandMoments band_moments(const DispersionModel& model, const FermiState& st, const QuadratureSpec& spec);

/// Trace of the velocity-gradient shape divided by d at one band point.
inline double trace_shape(const BandPoint& k, int dim) {
  return ((dim - 1) * k.v_over_p + k.dv_dp) / dim;
}

}  // namespace qmep
