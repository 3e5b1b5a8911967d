#ifndef OGSG_PARALLEL_HPP
#define OGSG_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ogsg {

inline int default_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(task_index) for task_index in [0, num_tasks). Work is pulled from a
// shared counter, so any worker may execute any task; results must therefore
// be written to per-task slots by the callable. The task decomposition is
// independent of the worker count, which keeps reductions deterministic.
template <class Fn>
void parallel_tasks(std::size_t num_tasks, int workers, const Fn& fn) {
  if (workers <= 0) workers = default_workers();
  std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), num_tasks);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < num_tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= num_tasks || failed.load()) break;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace ogsg

#endif
