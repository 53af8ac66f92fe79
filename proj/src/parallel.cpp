#include "jcglasso/parallel.hpp"

#include <atomic>

namespace jcglasso {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  g_threads.store(threads);
}

unsigned thread_count() { return g_threads.load(); }

}  // namespace jcglasso
