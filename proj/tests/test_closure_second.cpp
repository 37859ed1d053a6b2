#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "qmep/closure_second.hpp"
#include "qmep/constants.hpp"
#include "qmep/errors.hpp"

using namespace qmep;
using namespace qmep::constants;

namespace {

const double m_si = 0.32 * m_e;
const double a_si = 0.5 / eV;

DispersionModel silicon() { return DispersionModel::kane(m_si, a_si, 300.0); }
DispersionModel cone(double c_over) {
  const double vF = 1e6;
  return DispersionModel::graphene(vF, c_over * k_B * 300.0 / vF, 300.0);
}

MultiplierField1D sampled_field(int n, double length, Boundary b, double (*e0)(double, double),
                                double (*e1)(double, double)) {
  MultiplierField1D f;
  f.boundary = b;
  const double h = b == Boundary::Periodic ? length / n : length / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double x = (b == Boundary::Periodic ? 0.0 : -0.5 * length) + i * h;
    f.x.push_back(x);
    f.eta0.push_back(e0(x, length));
    f.eta1.push_back(e1(x, length));
    f.eta2.push_back(Vec{});
  }
  return f;
}

double wave_eta0(double x, double L) { return -1.0 + 0.5 * std::sin(2.0 * pi * x / L); }
double wave_eta1(double x, double L) { return 1.0 + 0.2 * std::cos(2.0 * pi * x / L); }

MultiplierJet wave_jet(double x, double L) {
  const double k = 2.0 * pi / L;
  MultiplierJet j;
  j.eta0 = wave_eta0(x, L);
  j.d_eta0 = 0.5 * k * std::cos(k * x);
  j.dd_eta0 = -0.5 * k * k * std::sin(k * x);
  j.eta1 = wave_eta1(x, L);
  j.d_eta1 = -0.2 * k * std::sin(k * x);
  j.dd_eta1 = -0.2 * k * k * std::cos(k * x);
  return j;
}

}  // namespace

TEST_CASE("homogeneous reduction of w2") {
  const auto model = silicon();
  const MultiplierJet flat{0.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  const double p0 = model.momentum_at(model.thermal_energy());
  // xi0 = eta1 eps / kT is not zero at p != 0; evaluate at p = 0 for the -1/4 example.
  CHECK(w2_pointwise(model, flat, 1.0, Vec{}) == -0.25);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const MultiplierJet jet{u(rng), 0.0, 0.0, 1.0 + 0.2 * u(rng), 0.0, 0.0};
    const Vec p{p0 * u(rng), p0 * u(rng), p0 * u(rng)};
    const double xi2 = u(rng);
    const double xi = jet.eta0 + jet.eta1 * model.energy(p) / model.thermal_energy();
    const double expected = -std::exp(xi) / ((std::exp(xi) + 1.0) * (std::exp(xi) + 1.0)) * xi2;
    CHECK(std::abs(w2_pointwise(model, jet, xi2, p) - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("bracket coefficients at xi = 0") {
  const auto c = w2_coefficients(0.0);
  CHECK(c[0] == 0.0);
  CHECK(std::abs(c[1] + 1.0 / 192.0) < 1e-17);
}

TEST_CASE("linear potential against the closed-form bracket") {
  // eta0 = a x, eta1 constant: only the term d2xi/dp_i dp_j dxi/dx_i dxi/dx_j survives.
  const auto model = silicon();
  const double kT = model.thermal_energy();
  const double a = 3e7;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double p0 = model.momentum_at(kT);
  for (int i = 0; i < 10; ++i) {
    const double x = 1e-8 * u(rng);
    const double eta1 = 1.0 + 0.5 * u(rng);
    const MultiplierJet jet{a * x, a, 0.0, eta1, 0.0, 0.0};
    const Vec p{2.0 * p0 * u(rng), 2.0 * p0 * u(rng), 2.0 * p0 * u(rng)};
    const double K = dot(p, p) / (2.0 * m_si);
    const double eps = 2.0 * K / (1.0 + std::sqrt(1.0 + 4.0 * a_si * K));
    const double s = 1.0 + 2.0 * a_si * eps;
    const double H11 = 1.0 / (m_si * s) - 2.0 * a_si * p[0] * p[0] / (m_si * m_si * s * s * s);
    const double xi = a * x + eta1 * eps / kT;
    const double e = std::exp(xi);
    const double bracket = (eta1 / kT) * H11 * a * a * (e * e - 4.0 * e + 1.0) / (3.0 * (e + 1.0));
    const double expected = e / (8.0 * (e + 1.0) * (e + 1.0) * (e + 1.0)) * bracket;
    CHECK(oracle::rel(w2_pointwise(model, jet, 0.0, p), expected) < 1e-10);
  }
}

TEST_CASE("constant field has no gradient term") {
  const auto model = silicon();
  auto flat = sampled_field(9, 1e-7, Boundary::OneSidedExtrapolation, [](double, double) { return -1.0; },
                            [](double, double) { return 1.2; });
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const auto r = psi_moments(model, flat, i);
    CHECK(r.psi_n == 0.0);
    CHECK(r.psi_W == 0.0);
    CHECK(norm(r.psi_J) == 0.0);
  }
}

TEST_CASE("quadratic eta0 profile against a nested momentum quadrature") {
  const auto model = silicon();
  const double kT = model.thermal_energy();
  const double c = 4e13;  // eta0 = -1 + c x^2
  auto eta0 = [c](double x) { return -1.0 + c * x * x; };
  MultiplierField1D f;
  const double h = 2e-8;
  for (int i = 0; i < 9; ++i) {
    const double x = (i - 4) * h + 5e-8;
    f.x.push_back(x);
    f.eta0.push_back(eta0(x));
    f.eta1.push_back(1.0);
    f.eta2.push_back(Vec{});
  }
  const std::size_t idx = 4;
  const double x0 = f.x[idx];
  const MultiplierJet jet{eta0(x0), 2.0 * c * x0, 2.0 * c, 1.0, 0.0, 0.0};
  const double P = model.momentum_at(60.0 * kT);
  const double p_edge = model.momentum_at(std::max(1.0 - eta0(x0), 1.0) * kT);
  auto shell = [&](double p) {
    auto inner = [&](double mu) {
      const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      return w2_pointwise(model, jet, 0.0, Vec{p * mu, p * st, 0.0});
    };
    return 2.0 * pi * p * p * oracle::finite(inner, -1.0, 1.0);
  };
  const double ref = model.degeneracy_y() * (oracle::finite(shell, 0.0, p_edge) + oracle::finite(shell, p_edge, P));
  QuadratureSpec tight;
  tight.rel_tol = 1e-12;
  const auto r = psi_moments(model, f, idx, tight);
  CHECK(oracle::rel(r.psi_n, ref) < 1e-6);
  CHECK(oracle::rel(psi_from_jet(model, jet, tight).psi_n, ref) < 1e-8);
}

TEST_CASE("fourth-order convergence of the stencil derivatives") {
  const auto model = silicon();
  const double L = 1e-7;
  QuadratureSpec tight;
  tight.rel_tol = 1e-13;
  tight.abs_tol = 0.0;
  const MultiplierJet exact = wave_jet(L / 8.0, L);
  const auto ref = psi_from_jet(model, exact, tight);
  std::vector<double> errs;
  for (int n : {24, 48, 96, 192}) {
    const auto f = sampled_field(n, L, Boundary::Periodic, wave_eta0, wave_eta1);
    const auto r = psi_moments(model, f, static_cast<std::size_t>(n / 8), tight);
    errs.push_back(std::abs(r.psi_n - ref.psi_n) / std::abs(ref.psi_n));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double ratio = errs[i - 1] / errs[i];
    INFO("ratio " << i << " = " << ratio);
    CHECK(ratio > 13.0);
    CHECK(ratio < 19.0);
  }
}

TEST_CASE("coarse grids raise the accuracy warning") {
  const auto model = silicon();
  const double L = 1e-7;
  const auto coarse = sampled_field(8, L, Boundary::Periodic, wave_eta0, wave_eta1);
  CHECK(psi_moments(model, coarse, 1, {}, 1e-6).accuracy_warning);
  const auto fine = sampled_field(400, L, Boundary::Periodic, wave_eta0, wave_eta1);
  CHECK_FALSE(psi_moments(model, fine, 50, {}, 1e-3).accuracy_warning);
}

TEST_CASE("mirror symmetry") {
  const auto model = silicon();
  auto e0 = [](double x, double L) { return -0.5 + 0.3 * x / L + 0.8 * (x / L) * (x / L) * (x / L); };
  auto e1 = [](double x, double L) { return 1.0 + 0.1 * std::sin(3.0 * x / L); };
  const auto f = sampled_field(11, 1e-7, Boundary::OneSidedExtrapolation, e0, e1);
  MultiplierField1D g = f;
  std::reverse(g.eta0.begin(), g.eta0.end());
  std::reverse(g.eta1.begin(), g.eta1.end());
  for (std::size_t i : {0u, 2u, 5u, 9u}) {
    const auto a = psi_moments(model, f, i);
    const auto b = psi_moments(model, g, f.size() - 1 - i);
    CHECK(oracle::rel(b.psi_n, a.psi_n) < 1e-12);
    CHECK(oracle::rel(b.psi_W, a.psi_W) < 1e-12);
    CHECK(norm(b.psi_J + a.psi_J) <= 1e-12 * (norm(a.psi_J) + 1e-300));
  }
}

TEST_CASE("second-order system matrix is minus the zeroth-order Jacobian") {
  for (const auto& model : {silicon(), cone(0.0), cone(1.0)}) {
    const Multipliers m0{-0.7, 1.4, {}};
    const auto A = second_order_matrix(model, m0);
    const auto J = jacobian_2x2(model, m0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(oracle::rel(A[i][j], -J[i][j]) < 1e-10);
  }
}

TEST_CASE("second-order round trip with no gradient term") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& model : {silicon(), cone(0.0), cone(1.0)}) {
    const Multipliers m0{-1.5, 1.2, {}};
    for (int i = 0; i < 20; ++i) {
      Multipliers m2{u(rng) * 1e66, u(rng) * 1e66, {u(rng) * 1e60, u(rng) * 1e60, 0.0}, Order::Second};
      if (model.dim() == 3) m2.eta2[2] = u(rng) * 1e60;
      const auto target = second_order_forward(model, m0, m2, {});
      const auto back = invert_second_order(model, m0, target, {});
      CHECK(std::abs(back.eta0 - m2.eta0) <= 1e-8 * std::abs(m2.eta0));
      CHECK(std::abs(back.eta1 - m2.eta1) <= 1e-8 * std::abs(m2.eta1));
      CHECK(norm(back.eta2 - m2.eta2) <= 1e-8 * norm(m2.eta2));
      const auto again = second_order_forward(model, m0, back, {});
      CHECK(std::abs(again.n - target.n) <= 1e-8 * std::abs(target.n));
    }
  }
}

TEST_CASE("second-order solve with a gradient term reproduces the target") {
  const auto model = silicon();
  const MultiplierJet jet = wave_jet(1e-8, 1e-7);
  const Multipliers m0{jet.eta0, jet.eta1, {}};
  const auto rhs = psi_from_jet(model, jet);
  const MomentVector target{0.7 * rhs.psi_n, -1.3 * rhs.psi_W, {1e65, 0.0, 0.0}, Order::Second};
  const auto m2 = invert_second_order(model, m0, target, rhs);
  const auto fwd = second_order_forward(model, m0, m2, rhs);
  CHECK(oracle::rel(fwd.n, target.n) < 1e-8);
  CHECK(oracle::rel(fwd.W, target.W) < 1e-8);
  CHECK(oracle::rel(fwd.J[0], target.J[0]) < 1e-8);
}

TEST_CASE("zero targets give zero multipliers and the anisotropy is isotropic") {
  const auto model = silicon();
  const Multipliers m0{-1.0, 1.0, {}};
  const auto z = invert_second_order(model, m0, MomentVector{0.0, 0.0, {}, Order::Second}, {});
  CHECK(z.eta0 == 0.0);
  CHECK(z.eta1 == 0.0);
  CHECK(norm(z.eta2) == 0.0);
  const auto x_only = invert_second_order(model, m0, MomentVector{0.0, 0.0, {5e60, 0.0, 0.0}, Order::Second}, {});
  CHECK(x_only.eta2[0] < 0.0);
  CHECK(std::abs(x_only.eta2[1]) <= 1e-12 * std::abs(x_only.eta2[0]));
  CHECK(std::abs(x_only.eta2[2]) <= 1e-12 * std::abs(x_only.eta2[0]));
}

TEST_CASE("semiclassical weight") {
  CHECK(second_order_weight(0.0) == 0.0);
  CHECK_FALSE(std::signbit(second_order_weight(0.0)));
  CHECK(oracle::rel(second_order_weight(1.0), hbar * hbar) < 1e-15);
  CHECK(oracle::rel(second_order_weight(0.5), 0.25 * hbar * hbar) < 1e-15);
}

TEST_CASE("velocity-gradient moment of Psi") {
  const MultiplierJet jet = wave_jet(1e-8, 1e-7);
  CHECK_THROWS_AS(psi_velocity_gradient(cone(0.0), jet), DomainError);
  const Mat g = psi_velocity_gradient(cone(1.0), jet);
  CHECK(std::isfinite(g[0][0]));
  CHECK(std::isfinite(g[1][1]));
  const Mat s = psi_velocity_gradient(silicon(), jet);
  CHECK(std::abs(s[0][1]) <= 1e-12 * std::abs(s[0][0]));
  const Mat zero = psi_velocity_gradient(silicon(), MultiplierJet{-1.0, 0.0, 0.0, 1.0, 0.0, 0.0});
  CHECK(zero[0][0] == 0.0);
}

TEST_CASE("field validation and CSV import") {
  MultiplierField1D short_field;
  short_field.x = {0, 1, 2, 3};
  short_field.eta0 = short_field.eta1 = {0, 0, 0, 0};
  short_field.eta2.assign(4, Vec{});
  CHECK_THROWS_AS(short_field.validate(), DomainError);
  MultiplierField1D uneven = sampled_field(6, 1.0, Boundary::OneSidedExtrapolation, wave_eta0, wave_eta1);
  uneven.x[3] += 1e-3;
  CHECK_THROWS_AS(uneven.validate(), DomainError);

  const auto path = std::filesystem::temp_directory_path() / "qmep_field_test.csv";
  {
    std::ofstream out(path);
    out << "# profile\nx,eta0,eta1,eta2_0\n";
    for (int i = 0; i < 6; ++i) out << i * 1e-9 << "," << -1.0 + 0.1 * i << ",1.0,0\n";
  }
  const auto f = MultiplierField1D::load_csv(path.string(), Boundary::OneSidedExtrapolation);
  CHECK(f.size() == 6);
  CHECK(f.eta0[5] == doctest::Approx(-0.5));
  CHECK(f.spacing() == doctest::Approx(1e-9));
  {
    std::ofstream out(path);
    out << "x,eta1\n0,1\n";
  }
  CHECK_THROWS_AS(MultiplierField1D::load_csv(path.string(), Boundary::Periodic), DomainError);
  std::filesystem::remove(path);
}
