#include "qmep/band_integral.hpp"

namespace qmep {

FermiEdge fermi_edge(const DispersionModel& model, const FermiState& st) {
  const double xmin = model.reduced_band_minimum();
  const double edge = -st.eta0 / st.eta1;
  return {std::max(edge, xmin), 1.0 / st.eta1};
}

BandMoments band_moments(const DispersionModel& model, const FermiState& st, const QuadratureSpec& spec) {
  const int d = model.dim();
  auto kernel = [d](const BandSample& s) {
    const double m = s.k.measure;
    const double x = s.k.x;
    const double v2 = m * s.k.speed2 / d;
    const double h = m * trace_shape(s.k, d);
    return std::array<double, 11>{s.f * m,      s.f * x * m,      s.f * v2,       s.f * h,
                                  s.fp * m,     s.fp * x * m,     s.fp * x * x * m, s.fp * v2,
                                  s.fp * x * v2, s.fp * h,        s.fp * x * h};
  };
  const auto r = band_integrate<11>(model, st, spec, kernel);
  BandMoments bm;
  bm.occ = {r.value[0], r.value[1]};
  bm.occ_p = r.value[2];
  bm.occ_h = r.value[3];
  bm.fp = {r.value[4], r.value[5], r.value[6]};
  bm.fp_v = r.value[7];
  bm.fp_vx = r.value[8];
  bm.fp_h = {r.value[9], r.value[10]};
  for (std::size_t k = 0; k < 11; ++k)
    if (r.value[k] != 0.0) bm.rel_error += r.error[k] / std::abs(r.value[k]);
  return bm;
}

}  // namespace qmep
