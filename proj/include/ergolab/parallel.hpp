#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace ergolab {

// Worker count from ERGOLAB_THREADS (default: hardware concurrency).
inline std::size_t thread_count() {
  if (const char* env = std::getenv("ERGOLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

inline constexpr std::size_t kChunk = 4096;

namespace detail {

// Runs job(w) for w in [0, workers) on separate threads; rethrows the first
// failure (by worker index) after all have joined.
template <class Job>
void run_workers(std::size_t workers, Job&& job) {
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          job(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

// Runs body(begin, end) over fixed-size chunks of [0, n). Chunk boundaries
// depend only on n, never on the number of threads.
template <class Body>
void for_each_chunk(std::size_t n, Body&& body) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  const std::size_t workers = std::min(thread_count(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c * kChunk, std::min(n, (c + 1) * kChunk));
    return;
  }
  detail::run_workers(workers, [&](std::size_t w) {
    for (std::size_t c = w; c < chunks; c += workers) body(c * kChunk, std::min(n, (c + 1) * kChunk));
  });
}

// Runs body(i) for each i in [0, n), indices dealt round-robin to workers.
// Callers write results by index, so the outcome is thread-count independent.
template <class Body>
void for_each_index(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  detail::run_workers(workers, [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += workers) body(i);
  });
}

// Pairwise tree sum of a vector of partials, in place.
template <class T>
T tree_sum(std::vector<T>& partial, T zero = T{}) {
  if (partial.empty()) return zero;
  for (std::size_t width = 1; width < partial.size(); width *= 2) {
    for (std::size_t i = 0; i + width < partial.size(); i += 2 * width) partial[i] += partial[i + width];
  }
  return partial[0];
}

// Sum of term(i) for i in [0, n): sequential within chunks, then a fixed
// pairwise tree over chunk partials.
template <class T, class Term>
T deterministic_sum(std::size_t n, Term&& term, T zero = T{}) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<T> partial(chunks, zero);
  for_each_chunk(n, [&](std::size_t b, std::size_t e) {
    T acc = zero;
    for (std::size_t i = b; i < e; ++i) acc += term(i);
    partial[b / kChunk] = acc;
  });
  return tree_sum(partial, zero);
}

}  // namespace ergolab
