#pragma once

// Adaptive Gauss-Kronrod quadrature for the semi-infinite energy integrals
// that appear in every moment, flux and production term.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qmep/errors.hpp"

namespace qmep {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 4000;
  /// Decay lengths past the Fermi window after which the finite part stops;
  /// the remainder is still integrated through a mapped tail.
  double truncation_margin = 60.0;

  /// Throws DomainError when rel_tol <= 0 or max_subdivisions < 8.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

template <std::size_t N>
struct QuadResultN {
  std::array<double, N> value{};
  std::array<double, N> error{};
  int intervals = 0;
};

/// Location of a Fermi edge and its width, in the integration variable.
struct FermiWindow {
  double edge;
  double width;
};

namespace detail {

// 21-point Kronrod / 10-point Gauss pair (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980365520, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
struct Segment {
  double a;
  double b;
  std::array<double, N> value;
  std::array<double, N> error;
  std::array<double, N> abs_value;  ///< integral of |f|
};

template <std::size_t N, class F>
Segment<N> gk21(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::abs(half);

  std::array<std::array<double, N>, 21> fv;
  fv[10] = f(center);
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[20 - j] = f(center + dx);
  }

  Segment<N> seg{a, b, {}, {}, {}};
  for (std::size_t k = 0; k < N; ++k) {
    const double fc = fv[10][k];
    double kron = fc * kWgk[10];
    double gauss = 0.0;
    double resabs = std::abs(kron);
    for (int j = 0; j < 10; ++j) {
      const double s = fv[j][k] + fv[20 - j][k];
      kron += kWgk[j] * s;
      resabs += kWgk[j] * (std::abs(fv[j][k]) + std::abs(fv[20 - j][k]));
      if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    const double mean = 0.5 * kron;
    double resasc = kWgk[10] * std::abs(fc - mean);
    for (int j = 0; j < 10; ++j)
      resasc += kWgk[j] * (std::abs(fv[j][k] - mean) + std::abs(fv[20 - j][k] - mean));

    kron *= half;
    gauss *= half;
    resabs *= abs_half;
    resasc *= abs_half;

    double err = std::abs(kron - gauss);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);

    seg.value[k] = kron;
    seg.error[k] = err;
    seg.abs_value[k] = resabs;
  }
  return seg;
}

}  // namespace detail

/// Globally adaptive GK21 over the union of [points[i], points[i+1]].
/// Every component must meet max(rel_tol |I|, abs_tol, 100 eps int|f|); the
/// last term is the roundoff floor of integrands that cancel almost exactly.
/// On failure throws ConvergenceError with the partial estimate of the worst
/// component.
template <std::size_t N, class F>
QuadResultN<N> integrate_piecewise_n(const F& f, std::span<const double> points, const QuadratureSpec& spec) {
  std::vector<detail::Segment<N>> segs;
  segs.reserve(static_cast<std::size_t>(spec.max_subdivisions) + points.size());
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] > points[i]) segs.push_back(detail::gk21<N>(f, points[i], points[i + 1]));
  }

  QuadResultN<N> out;
  std::array<double, N> abs_total{};
  auto totals = [&] {
    out.value.fill(0.0);
    out.error.fill(0.0);
    abs_total.fill(0.0);
    for (const auto& s : segs)
      for (std::size_t k = 0; k < N; ++k) {
        out.value[k] += s.value[k];
        out.error[k] += s.error[k];
        abs_total[k] += s.abs_value[k];
      }
  };
  constexpr double roundoff = 100.0 * std::numeric_limits<double>::epsilon();
  auto tolerance = [&](std::size_t k) {
    return std::max({spec.rel_tol * std::abs(out.value[k]), spec.abs_tol, roundoff * abs_total[k]});
  };

  totals();
  int subdivisions = 0;
  while (true) {
    bool done = true;
    for (std::size_t k = 0; k < N; ++k)
      if (out.error[k] > tolerance(k)) done = false;
    if (done || segs.empty()) break;

    // Split the segment with the largest tolerance-weighted error.
    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      double score = 0.0;
      for (std::size_t k = 0; k < N; ++k) score = std::max(score, segs[i].error[k] / tolerance(k));
      const double width = segs[i].b - segs[i].a;
      if (width <= 1e-14 * std::max(std::abs(segs[i].a), std::abs(segs[i].b))) continue;
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    if (worst_score < 0.0 || subdivisions >= spec.max_subdivisions) {
      std::size_t bad = 0;
      for (std::size_t k = 0; k < N; ++k)
        if (out.error[k] / tolerance(k) > out.error[bad] / tolerance(bad)) bad = k;
      throw ConvergenceError("adaptive quadrature did not converge", out.value[bad], out.error[bad]);
    }
    const auto s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    segs[worst] = detail::gk21<N>(f, s.a, mid);
    segs.push_back(detail::gk21<N>(f, mid, s.b));
    ++subdivisions;
    totals();
  }
  out.intervals = static_cast<int>(segs.size());
  return out;
}

/// Integral of f over [cut, inf) through x = cut + scale * t / (1 - t).
/// The tail only has to be accurate relative to the body it completes, so a
/// tail that stalls at the strict tolerance is retried at that level.
template <std::size_t N, class F>
QuadResultN<N> integrate_tail_n(const F& f, double cut, double scale, const QuadratureSpec& spec,
                                const QuadResultN<N>& body) {
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    std::array<double, N> v{};
    if (one_minus <= 0.0) return v;
    const double x = cut + scale * t / one_minus;
    const double jac = scale / (one_minus * one_minus);
    v = f(x);
    // Far out the decaying factor underflows first; 0 * inf from a growing
    // polynomial factor is read as the zero it represents.
    for (auto& c : v) c = (c == 0.0 || !std::isfinite(c)) ? 0.0 : c * jac;
    return v;
  };
  const std::array<double, 2> tail_pts{0.0, 1.0};
  try {
    return integrate_piecewise_n<N>(mapped, tail_pts, spec);
  } catch (const ConvergenceError&) {
    double body_scale = 0.0;
    for (std::size_t k = 0; k < N; ++k) body_scale = std::max(body_scale, std::abs(body.value[k]));
    QuadratureSpec relaxed = spec;
    relaxed.abs_tol = std::max(spec.abs_tol, spec.rel_tol * body_scale);
    return integrate_piecewise_n<N>(mapped, tail_pts, relaxed);
  }
}

/// Semi-infinite integral of a vector-valued integrand. With a window the
/// domain is split around the edge before refinement; the tail beyond
/// edge + truncation_margin * width is mapped onto a finite interval.
/// Extra breakpoints below the cut are honoured as well.
template <std::size_t N, class F>
QuadResultN<N> integrate_semi_infinite_n(const F& f, double lower, const QuadratureSpec& spec,
                                         std::optional<FermiWindow> window = std::nullopt,
                                         std::span<const double> extra_points = {}) {
  const FermiWindow w = window.value_or(FermiWindow{lower, 1.0});
  const double width = w.width > 0.0 ? w.width : 1.0;
  const double start = std::max(lower, w.edge);
  const double cut = start + spec.truncation_margin * width;

  std::vector<double> pts{lower};
  for (double off : {-8.0, -2.0, 0.0, 2.0, 8.0}) {
    const double p = w.edge + off * width;
    if (p > lower && p < cut) pts.push_back(p);
  }
  for (double p : extra_points)
    if (p > lower && p < cut) pts.push_back(p);
  pts.push_back(cut);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  QuadResultN<N> body = integrate_piecewise_n<N>(f, pts, spec);

  const QuadResultN<N> tail = integrate_tail_n<N>(f, cut, width, spec, body);

  QuadResultN<N> out;
  for (std::size_t k = 0; k < N; ++k) {
    out.value[k] = body.value[k] + tail.value[k];
    out.error[k] = body.error[k] + tail.error[k];
  }
  out.intervals = body.intervals + tail.intervals;
  return out;
}

/// Adaptive integral of f over [a, b].
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec = {});

/// Integral of f over [lower, inf) for integrands with exponential or
/// algebraic-times-exponential decay.
QuadResult integrate_semi_infinite(const std::function<double(double)>& f, double lower,
                                   const QuadratureSpec& spec = {},
                                   std::optional<FermiWindow> window = std::nullopt);

/// Complete Fermi-Dirac integral F_k(eta) = 1/Gamma(k+1) int_0^inf t^k / (1 + e^(t - eta)) dt.
/// Requires k > -1.
double fermi_integral(double k, double eta, const QuadratureSpec& spec = {});

/// Bose-Einstein occupation 1 / (exp(hbar_omega / k_B T_L) - 1); hbar_omega in J.
double bose_occupation(double hbar_omega, double T_L);

// Numerically stable Fermi-function pieces. logistic(x) = 1/(1+e^-x),
// fermi(x) = 1/(1+e^x), fermi_prime(x) = e^x/(1+e^x)^2.
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
inline double fermi(double x) { return logistic(-x); }
inline double fermi_prime(double x) { return logistic(x) * logistic(-x); }

}  // namespace qmep
