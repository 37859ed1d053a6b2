#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qmep/closure_second.hpp"
#include "qmep/errors.hpp"

namespace qmep {

void MultiplierField1D::validate() const {
  const std::size_t n = x.size();
  if (n < 5) throw DomainError("multiplier field needs at least 5 grid points");
  if (eta0.size() != n || eta1.size() != n || (!eta2.empty() && eta2.size() != n))
    throw DomainError("multiplier field arrays differ in length");
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  if (!(h > 0.0)) throw DomainError("grid must be strictly increasing");
  for (std::size_t i = 1; i < n; ++i) {
    const double hi = x[i] - x[i - 1];
    if (!(hi > 0.0)) throw DomainError("grid must be strictly increasing");
    if (std::abs(hi - h) > 1e-12 * std::max(std::abs(h), std::abs(x[i]))) throw DomainError("grid must be uniform");
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!(eta1[i] > 0.0) || !std::isfinite(eta0[i])) throw DomainError("invalid multipliers in field");
}

double MultiplierField1D::spacing() const {
  return (x.back() - x.front()) / static_cast<double>(x.size() - 1);
}

namespace {

struct Stencil {
  std::array<double, 6> w;
  std::array<long, 6> offset;
  int len;
  double denom_power;  // 1 for first, 2 for second derivatives
};

double apply(const std::vector<double>& f, std::size_t i, const Stencil& s, double h, bool periodic) {
  const long n = static_cast<long>(f.size());
  // Applied to differences from the centre value; the weights sum to zero.
  const double centre = f[i];
  double acc = 0.0;
  for (int k = 0; k < s.len; ++k) {
    long j = static_cast<long>(i) + s.offset[k];
    if (periodic) j = ((j % n) + n) % n;
    acc += s.w[k] * (f[static_cast<std::size_t>(j)] - centre);
  }
  return acc / std::pow(h, s.denom_power);
}

// Mirrors a left-boundary stencil to the right boundary.
Stencil mirror(Stencil s) {
  for (int k = 0; k < s.len; ++k) {
    s.offset[k] = -s.offset[k];
    if (s.denom_power == 1.0) s.w[k] = -s.w[k];
  }
  return s;
}

struct Pair {
  Stencil first;
  Stencil second;
};

// Fourth-order stencils (divided by 12 h or 12 h^2).
Pair fine_stencils(std::size_t i, std::size_t n, bool periodic) {
  const Stencil c1{{1, -8, 0, 8, -1}, {-2, -1, 0, 1, 2}, 5, 1};
  const Stencil c2{{-1, 16, -30, 16, -1}, {-2, -1, 0, 1, 2}, 5, 2};
  if (periodic || (i >= 2 && i + 2 < n)) return {c1, c2};
  const bool six = n >= 6;
  const Stencil l0_1{{-25, 48, -36, 16, -3}, {0, 1, 2, 3, 4}, 5, 1};
  const Stencil l1_1{{-3, -10, 18, -6, 1}, {-1, 0, 1, 2, 3}, 5, 1};
  const Stencil l0_2 = six ? Stencil{{45, -154, 214, -156, 61, -10}, {0, 1, 2, 3, 4, 5}, 6, 2}
                           : Stencil{{35, -104, 114, -56, 11}, {0, 1, 2, 3, 4}, 5, 2};
  const Stencil l1_2 = six ? Stencil{{10, -15, -4, 14, -6, 1}, {-1, 0, 1, 2, 3, 4}, 6, 2}
                           : Stencil{{11, -20, 6, 4, -1}, {-1, 0, 1, 2, 3}, 5, 2};
  if (i == 0) return {l0_1, l0_2};
  if (i == 1) return {l1_1, l1_2};
  if (i == n - 1) return {mirror(l0_1), mirror(l0_2)};
  return {mirror(l1_1), mirror(l1_2)};
}

// Second-order stencils (scaled to the same 12 h denominators).
Pair coarse_stencils(std::size_t i, std::size_t n, bool periodic) {
  const Stencil c1{{-6, 0, 6}, {-1, 0, 1}, 3, 1};
  const Stencil c2{{12, -24, 12}, {-1, 0, 1}, 3, 2};
  if (periodic || (i >= 1 && i + 1 < n)) return {c1, c2};
  const Stencil l0_1{{-18, 24, -6}, {0, 1, 2}, 3, 1};
  const Stencil l0_2{{24, -60, 48, -12}, {0, 1, 2, 3}, 4, 2};
  if (i == 0) return {l0_1, l0_2};
  return {mirror(l0_1), mirror(l0_2)};
}

MultiplierJet jet_with(const MultiplierField1D& f, std::size_t i, const Pair& s, double h, bool periodic) {
  MultiplierJet j;
  j.eta0 = f.eta0[i];
  j.eta1 = f.eta1[i];
  j.d_eta0 = apply(f.eta0, i, s.first, h, periodic) / 12.0;
  j.dd_eta0 = apply(f.eta0, i, s.second, h, periodic) / 12.0;
  j.d_eta1 = apply(f.eta1, i, s.first, h, periodic) / 12.0;
  j.dd_eta1 = apply(f.eta1, i, s.second, h, periodic) / 12.0;
  return j;
}

}  // namespace

StencilDerivatives field_jet(const MultiplierField1D& field, std::size_t index) {
  field.validate();
  if (index >= field.size()) throw DomainError("grid index out of range");
  const bool periodic = field.boundary == Boundary::Periodic;
  const double h = field.spacing();
  const std::size_t n = field.size();
  return {jet_with(field, index, fine_stencils(index, n, periodic), h, periodic),
          jet_with(field, index, coarse_stencils(index, n, periodic), h, periodic)};
}

MultiplierField1D MultiplierField1D::load_csv(const std::string& path, Boundary boundary) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open multiplier field file: " + path);
  MultiplierField1D f;
  f.boundary = boundary;
  std::string line;
  std::vector<std::string> header;
  int col_x = -1, col_e0 = -1, col_e1 = -1;
  std::array<int, 3> col_e2{-1, -1, -1};
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (header.empty()) {
      header = cells;
      for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        const auto& name = cells[c];
        if (name == "x") col_x = c;
        else if (name == "eta0") col_e0 = c;
        else if (name == "eta1") col_e1 = c;
        else if (name == "eta2_0" || name == "eta2") col_e2[0] = c;
        else if (name == "eta2_1") col_e2[1] = c;
        else if (name == "eta2_2") col_e2[2] = c;
      }
      if (col_x < 0 || col_e0 < 0 || col_e1 < 0) throw DomainError("field CSV needs x, eta0 and eta1 columns");
      continue;
    }
    if (cells.size() != header.size()) throw DomainError("field CSV row has the wrong number of cells");
    auto num = [&](int c) {
      try {
        return std::stod(cells[c]);
      } catch (const std::exception&) {
        throw DomainError("field CSV cell is not a number: " + cells[c]);
      }
    };
    f.x.push_back(num(col_x));
    f.eta0.push_back(num(col_e0));
    f.eta1.push_back(num(col_e1));
    Vec e2{};
    for (int k = 0; k < 3; ++k)
      if (col_e2[k] >= 0) e2[k] = num(col_e2[k]);
    f.eta2.push_back(e2);
  }
  f.validate();
  return f;
}

}  // namespace qmep
