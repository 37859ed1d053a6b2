#include "qmep/sweep.hpp"

namespace qmep {

namespace {

// The batch kernels are written once against a map policy.
struct ParallelPolicy {
  template <class T, class F>
  static std::vector<BatchItem<T>> map(std::size_t count, const F& fn) {
    return parallel_map<T>(count, fn);
  }
};

struct SerialPolicy {
  template <class T, class F>
  static std::vector<BatchItem<T>> map(std::size_t count, const F& fn) {
    return serial_map<T>(count, fn);
  }
};

template <class Policy>
std::vector<BatchItem<InversionResult>> invert_with(const DispersionModel& model,
                                                    const std::vector<MomentVector>& targets,
                                                    const QuadratureSpec& spec) {
  return Policy::template map<InversionResult>(
      targets.size(), [&](std::size_t i) { return invert_constraints(model, targets[i], std::nullopt, spec); });
}

template <class Policy>
std::vector<BatchItem<MomentVector>> forward_with(const DispersionModel& model, const std::vector<Multipliers>& mults,
                                                  const QuadratureSpec& spec) {
  return Policy::template map<MomentVector>(mults.size(),
                                            [&](std::size_t i) { return constraints_forward(model, mults[i], spec); });
}

template <class Policy>
std::vector<BatchItem<SecondOrderRHS>> psi_with(const DispersionModel& model, const MultiplierField1D& field,
                                                const QuadratureSpec& spec) {
  field.validate();
  return Policy::template map<SecondOrderRHS>(field.size(),
                                              [&](std::size_t i) { return psi_moments(model, field, i, spec); });
}

template <class Policy>
std::vector<BatchItem<ProductionVector>> production_with(const DispersionModel& model,
                                                         const std::vector<Multipliers>& mults,
                                                         const std::vector<PhononChannel>& channels,
                                                         const QuadratureSpec& spec) {
  return Policy::template map<ProductionVector>(
      mults.size(), [&](std::size_t i) { return total_production(model, mults[i], channels, spec); });
}

}  // namespace

namespace parallel {

std::vector<BatchItem<InversionResult>> invert_batch(const DispersionModel& model,
                                                     const std::vector<MomentVector>& targets,
                                                     const QuadratureSpec& spec) {
  return invert_with<ParallelPolicy>(model, targets, spec);
}
std::vector<BatchItem<MomentVector>> forward_batch(const DispersionModel& model, const std::vector<Multipliers>& mults,
                                                   const QuadratureSpec& spec) {
  return forward_with<ParallelPolicy>(model, mults, spec);
}
std::vector<BatchItem<SecondOrderRHS>> psi_moments_field(const DispersionModel& model,
                                                         const MultiplierField1D& field, const QuadratureSpec& spec) {
  return psi_with<ParallelPolicy>(model, field, spec);
}
std::vector<BatchItem<ProductionVector>> production_batch(const DispersionModel& model,
                                                          const std::vector<Multipliers>& mults,
                                                          const std::vector<PhononChannel>& channels,
                                                          const QuadratureSpec& spec) {
  return production_with<ParallelPolicy>(model, mults, channels, spec);
}

}  // namespace parallel

namespace serial {

std::vector<BatchItem<InversionResult>> invert_batch(const DispersionModel& model,
                                                     const std::vector<MomentVector>& targets,
                                                     const QuadratureSpec& spec) {
  return invert_with<SerialPolicy>(model, targets, spec);
}
std::vector<BatchItem<MomentVector>> forward_batch(const DispersionModel& model, const std::vector<Multipliers>& mults,
                                                   const QuadratureSpec& spec) {
  return forward_with<SerialPolicy>(model, mults, spec);
}
std::vector<BatchItem<SecondOrderRHS>> psi_moments_field(const DispersionModel& model,
                                                         const MultiplierField1D& field, const QuadratureSpec& spec) {
  return psi_with<SerialPolicy>(model, field, spec);
}
std::vector<BatchItem<ProductionVector>> production_batch(const DispersionModel& model,
                                                          const std::vector<Multipliers>& mults,
                                                          const std::vector<PhononChannel>& channels,
                                                          const QuadratureSpec& spec) {
  return production_with<SerialPolicy>(model, mults, channels, spec);
}

}  // namespace serial

}  // namespace qmep
