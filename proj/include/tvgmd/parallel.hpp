#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tvgmd::detail {

// Runs body(i) for i in [0, count) over contiguous chunks. Each index must
// write only its own output slot, which keeps results independent of the
// thread count.
template <typename Body>
void parallel_for(std::ptrdiff_t count, int threads, Body&& body) {
  const auto workers = static_cast<std::ptrdiff_t>(
      std::clamp<std::ptrdiff_t>(threads, 1, std::max<std::ptrdiff_t>(count, 1)));
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::ptrdiff_t chunk = (count + workers - 1) / workers;
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
      const std::ptrdiff_t begin = w * chunk;
      const std::ptrdiff_t end = std::min(count, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          for (std::ptrdiff_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace tvgmd::detail
