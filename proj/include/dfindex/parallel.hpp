#pragma once

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace dfindex {

inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DFINDEX_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

// results are stored by index, so the output never depends on scheduling;
// the lowest-index exception wins
template <class F>
auto parallel_map(size_t count, F f) -> std::vector<decltype(f(size_t{}))> {
  using R = decltype(f(size_t{}));
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errs(count);
  unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<size_t>(count, 1)));
  auto run = [&](unsigned w) {
    for (size_t i = w; i < count; i += workers) {
      try {
        out[i] = f(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace dfindex
