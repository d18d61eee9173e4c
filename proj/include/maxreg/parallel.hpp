#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "maxreg/error.hpp"

namespace maxreg {

/// Number of worker threads used when a caller passes 0 ("auto").
inline unsigned hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

/// Parses a thread knob: a positive integer or "auto". An empty string falls
/// back to the MAXREG_THREADS environment variable, then to "auto".
inline unsigned parse_threads(const std::string& knob) {
  std::string value = knob;
  if (value.empty()) {
    if (const char* env = std::getenv("MAXREG_THREADS")) value = env;
  }
  if (value.empty() || value == "auto") return hardware_threads();
  std::size_t used = 0;
  long n = 0;
  try {
    n = std::stol(value, &used);
  } catch (const std::exception&) {
    throw argument_error("threads must be a positive integer or \"auto\", got \"" + value + "\"");
  }
  if (used != value.size() || n <= 0)
    throw argument_error("threads must be a positive integer or \"auto\", got \"" + value + "\"");
  return static_cast<unsigned>(n);
}

/// Runs body(begin, end, worker) over [0, count) split into contiguous blocks.
/// Blocks depend only on (count, threads), so any per-block output layout is
/// reproducible. Exceptions from workers are rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (count == 0) return;
  const unsigned workers = std::max(1u, std::min<unsigned>(threads == 0 ? hardware_threads() : threads,
                                                           static_cast<unsigned>(std::min<std::size_t>(count, 1u << 16))));
  if (workers == 1) {
    body(std::size_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * block);
    const std::size_t end = std::min(count, begin + block);
    pool.emplace_back([&, begin, end, w] {
      try {
        if (begin < end) body(begin, end, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

} // namespace maxreg
