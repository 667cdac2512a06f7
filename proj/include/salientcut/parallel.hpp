#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace salientcut {

// Process-wide worker pool. Every parallel helper below partitions work into
// chunks whose boundaries depend only on the problem size, never on the
// number of workers, so results are bitwise independent of the pool size.

void set_worker_count(std::size_t workers);
std::size_t worker_count();

// Worker count from SALIENTCUT_THREADS, or 1 when unset/invalid.
std::size_t worker_count_from_env();

namespace detail {
void run_chunks(std::size_t chunks, const std::function<void(std::size_t)>& fn);
}

/// Calls fn(lo, hi) over [begin, end) split into chunks of `grain` items.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, std::size_t grain, Fn&& fn) {
  if (end <= begin) return;
  if (grain == 0) grain = 1;
  const std::size_t n = end - begin;
  const std::size_t chunks = (n + grain - 1) / grain;
  if (chunks == 1) {
    fn(begin, end);
    return;
  }
  detail::run_chunks(chunks, [&](std::size_t c) {
    const std::size_t lo = begin + c * grain;
    const std::size_t hi = lo + grain < end ? lo + grain : end;
    fn(lo, hi);
  });
}

/// Deterministic reduction: partial(lo, hi) is evaluated per fixed-size chunk
/// and the partials are combined left to right in chunk order.
template <class T, class Partial, class Combine>
T parallel_reduce(std::size_t begin, std::size_t end, std::size_t grain, T init, Partial&& partial,
                  Combine&& combine) {
  if (end <= begin) return init;
  if (grain == 0) grain = 1;
  const std::size_t chunks = (end - begin + grain - 1) / grain;
  std::vector<T> parts(chunks, init);
  parallel_for(0, chunks, 1, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t c = c0; c < c1; ++c) {
      const std::size_t lo = begin + c * grain;
      const std::size_t hi = lo + grain < end ? lo + grain : end;
      parts[c] = partial(lo, hi);
    }
  });
  T acc = init;
  for (auto& p : parts) acc = combine(acc, p);
  return acc;
}

}  // namespace salientcut
