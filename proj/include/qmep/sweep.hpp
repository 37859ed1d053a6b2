#pragma once

// Batch evaluation of independent points. Every function exists twice: in
// qmep::parallel (OpenMP, dynamic schedule) and in qmep::serial (plain loop,
// the reference the parallel version is tested against). Results come back
// in input order, and a failing point is recorded rather than aborting the
// batch.

#include <optional>
#include <string>
#include <vector>

#include "qmep/closure_second.hpp"
#include "qmep/closure_zero.hpp"
#include "qmep/collisions.hpp"
#include "qmep/dispersion.hpp"
#include "qmep/quadrature.hpp"

namespace qmep {

template <class T>
struct BatchItem {
  std::optional<T> value;
  std::string error;  ///< empty when value is set

  bool ok() const { return value.has_value(); }
};

namespace parallel {

std::vector<BatchItem<InversionResult>> invert_batch(const DispersionModel& model,
                                                     const std::vector<MomentVector>& targets,
                                                     const QuadratureSpec& spec = {});
std::vector<BatchItem<MomentVector>> forward_batch(const DispersionModel& model,
                                                   const std::vector<Multipliers>& mults,
                                                   const QuadratureSpec& spec = {});
/// psi_moments at every grid point of the field.
std::vector<BatchItem<SecondOrderRHS>> psi_moments_field(const DispersionModel& model,
                                                         const MultiplierField1D& field,
                                                         const QuadratureSpec& spec = {});
std::vector<BatchItem<ProductionVector>> production_batch(const DispersionModel& model,
                                                          const std::vector<Multipliers>& mults,
                                                          const std::vector<PhononChannel>& channels,
                                                          const QuadratureSpec& spec = {});

}  // namespace parallel

namespace serial {

std::vector<BatchItem<InversionResult>> invert_batch(const DispersionModel& model,
                                                     const std::vector<MomentVector>& targets,
                                                     const QuadratureSpec& spec = {});
std::vector<BatchItem<MomentVector>> forward_batch(const DispersionModel& model,
                                                   const std::vector<Multipliers>& mults,
                                                   const QuadratureSpec& spec = {});
std::vector<BatchItem<SecondOrderRHS>> psi_moments_field(const DispersionModel& model,
                                                         const MultiplierField1D& field,
                                                         const QuadratureSpec& spec = {});
std::vector<BatchItem<ProductionVector>> production_batch(const DispersionModel& model,
                                                          const std::vector<Multipliers>& mults,
                                                          const std::vector<PhononChannel>& channels,
                                                          const QuadratureSpec& spec = {});

}  // namespace serial

/// Runs fn(i) for i in [0, count) on the OpenMP pool and returns the results
/// in index order; exceptions derived from std::exception become error items.
template <class T, class F>
std::vector<BatchItem<T>> parallel_map(std::size_t count, const F& fn);

/// Same as parallel_map on the calling thread.
template <class T, class F>
std::vector<BatchItem<T>> serial_map(std::size_t count, const F& fn);

}  // namespace qmep

#include "qmep/sweep_impl.hpp"
