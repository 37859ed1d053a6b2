#pragma once

#include <exception>

namespace qmep {

namespace detail {

template <class T, class F>
BatchItem<T> run_item(const F& fn, std::size_t i) {
  BatchItem<T> item;
  try {
    item.value = fn(i);
  } catch (const std::exception& e) {
    item.error = e.what();
  }
  return item;
}

}  // namespace detail

template <class T, class F>
std::vector<BatchItem<T>> parallel_map(std::size_t count, const F& fn) {
  std::vector<BatchItem<T>> out(count);
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = detail::run_item<T>(fn, static_cast<std::size_t>(i));
  return out;
}

template <class T, class F>
std::vector<BatchItem<T>> serial_map(std::size_t count, const F& fn) {
  std::vector<BatchItem<T>> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = detail::run_item<T>(fn, i);
  return out;
}

}  // namespace qmep
