#pragma once

#include <cstddef>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcond {

// Data-parallel kernels come in two flavours: a serial reference loop and an
// OpenMP loop over independent slots. Each job writes only to its own output
// slot, so results are bitwise identical for any thread count; the serial
// path is kept as the reference implementation and for the thread_count()==1
// determinism contract.

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

template <typename Fn>
void serial_for(std::size_t n, Fn&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

template <typename Fn>
void omp_for(std::size_t n, Fn&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < static_cast<long long>(n); ++i) body(static_cast<std::size_t>(i));
#else
  serial_for(n, body);
#endif
}

/// Dispatches to the OpenMP kernel when more than one thread is requested.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& body) {
  if (threads == 1) {
    serial_for(n, body);
  } else {
    set_threads(threads);
    omp_for(n, body);
  }
}

}  // namespace pcond
