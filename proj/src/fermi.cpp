#include <cmath>

#include "qmep/constants.hpp"
#include "qmep/quadrature.hpp"

namespace qmep {

namespace {

// Alternating series sum_j (-1)^(j+1) e^(j eta) / j^(k+1), fast for eta <= -2.
double fermi_series(double k, double eta) {
  const double z = std::exp(eta);
  double term_pow = z;
  double sum = 0.0;
  for (int j = 1; j < 200; ++j) {
    const double term = term_pow / std::pow(static_cast<double>(j), k + 1.0);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-17 * std::abs(sum)) break;
    term_pow *= z;
  }
  return sum;
}

}  // namespace

double fermi_integral(double k, double eta, const QuadratureSpec& spec) {
  if (!(k > -1.0)) throw DomainError("fermi_integral requires k > -1");
  if (!std::isfinite(eta)) throw DomainError("fermi_integral requires finite eta");
  if (eta <= -2.0) return fermi_series(k, eta);

  // chi = u^2 removes the square-root behaviour at the origin for half-integer k.
  const double two_k_plus_one = 2.0 * k + 1.0;
  auto integrand = [&](double u) {
    const double chi = u * u;
    return std::array<double, 1>{2.0 * std::pow(u, two_k_plus_one) * fermi(chi - eta)};
  };
  std::optional<FermiWindow> window;
  if (eta > 0.0) {
    const double u_edge = std::sqrt(eta);
    window = FermiWindow{u_edge, std::min(1.0, 1.0 / (2.0 * u_edge))};
  }
  const auto r = integrate_semi_infinite_n<1>(integrand, 0.0, spec, window);
  return r.value[0] / std::tgamma(k + 1.0);
}

double bose_occupation(double hbar_omega, double T_L) {
  if (!(hbar_omega > 0.0)) throw DomainError("bose_occupation requires hbar_omega > 0");
  if (!(T_L > 0.0)) throw DomainError("bose_occupation requires T_L > 0");
  return 1.0 / std::expm1(hbar_omega / (constants::k_B * T_L));
}

}  // namespace qmep
