#include "qmep/quadrature.hpp"

namespace qmep {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("quadrature rel_tol must be positive");
  if (!(abs_tol >= 0.0)) throw DomainError("quadrature abs_tol must be non-negative");
  if (max_subdivisions < 8) throw DomainError("quadrature max_subdivisions must be at least 8");
  if (!(truncation_margin > 0.0)) throw DomainError("quadrature truncation_margin must be positive");
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec) {
  spec.validate();
  const std::array<double, 2> pts{a, b};
  auto g = [&](double x) { return std::array<double, 1>{f(x)}; };
  const auto r = integrate_piecewise_n<1>(g, pts, spec);
  return {r.value[0], r.error[0], r.intervals};
}

QuadResult integrate_semi_infinite(const std::function<double(double)>& f, double lower, const QuadratureSpec& spec,
                                   std::optional<FermiWindow> window) {
  spec.validate();
  auto g = [&](double x) { return std::array<double, 1>{f(x)}; };
  const auto r = integrate_semi_infinite_n<1>(g, lower, spec, window);
  return {r.value[0], r.error[0], r.intervals};
}

}  // namespace qmep
