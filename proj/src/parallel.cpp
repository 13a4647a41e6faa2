#include "scwave/parallel.hpp"

#include <cstdlib>
#include <string>

namespace scwave {

namespace {
std::atomic<int> g_override{0};
}

int worker_threads() {
  if (const int n = g_override.load(); n > 0) return n;
  if (const char* env = std::getenv("SCWAVE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_worker_threads(int n) { g_override = n > 0 ? n : 0; }

}  // namespace scwave
