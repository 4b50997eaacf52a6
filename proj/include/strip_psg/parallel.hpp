#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace strip_psg {

// Worker cap: STRIP_PSG_THREADS if set to a positive integer, else hardware.
inline int worker_count() {
  if (const char* env = std::getenv("STRIP_PSG_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, n). Results must be written to per-index slots
// so reductions stay deterministic.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  int workers = worker_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  tbb::task_arena arena(workers);
  arena.execute([&] { tbb::parallel_for(std::size_t(0), n, [&](std::size_t i) { body(i); }); });
}

}  // namespace strip_psg
