#include "hypowave/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hypowave {

std::size_t thread_cap() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HYPOWAVE_THREADS")) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return hw;
}

}  // namespace hypowave
