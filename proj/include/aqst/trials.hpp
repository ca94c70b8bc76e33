#pragma once

// Trial-parallel map. The serial loop is the reference; the OpenMP loop must
// produce the identical vector because every trial seeds its own stream and
// writes only its own slot.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aqst {

enum class Execution { serial, parallel };

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_worker_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

template <class Fn>
auto map_trials_serial(std::size_t trials, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, std::uint64_t>;
  std::vector<Result> out(trials);
  for (std::size_t i = 0; i < trials; ++i) out[i] = fn(std::uint64_t(i));
  return out;
}

template <class Fn>
auto map_trials_parallel(std::size_t trials, Fn&& fn) {
  using Result = std::invoke_result_t<Fn&, std::uint64_t>;
  std::vector<Result> out(trials);
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[std::size_t(i)] = fn(std::uint64_t(i));
    } catch (...) {
#pragma omp critical(aqst_trial_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

template <class Fn>
auto map_trials(std::size_t trials, Fn&& fn, Execution exec = Execution::parallel) {
  return exec == Execution::serial ? map_trials_serial(trials, fn) : map_trials_parallel(trials, fn);
}

}  // namespace aqst
