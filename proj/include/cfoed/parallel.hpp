#pragma once

#include <atomic>
#include <exception>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cfoed {

struct ExecPolicy {
  int threads = 1;  // <= 1 runs serial

  static ExecPolicy serial() { return ExecPolicy{1}; }
  static ExecPolicy with_threads(int n) { return ExecPolicy{n}; }
  static ExecPolicy hardware() {
#ifdef _OPENMP
    return ExecPolicy{omp_get_max_threads()};
#else
    return ExecPolicy{1};
#endif
  }
};

/// Deterministic parallel loop. body(i) must only write to caller-owned
/// storage addressed by i; reductions happen after the loop, in index
/// order, so results do not depend on the thread count. The first thrown
/// exception (lowest index) is rethrown on the calling thread.
template <typename Body>
void parallel_for(int n, const ExecPolicy& policy, Body&& body) {
  if (n <= 0) return;
  if (policy.threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<bool> failed{false};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(policy.threads)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  }
#else
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  }
#endif
  if (failed.load()) {
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
}

}  // namespace cfoed
