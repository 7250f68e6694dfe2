#include "morley/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace morley {

int worker_count() {
  if (const char* env = std::getenv("MORLEY_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(std::size_t n, int num_chunks,
                     const std::function<void(int, std::size_t, std::size_t)>& body) {
  if (num_chunks < 1) num_chunks = 1;
  auto bound = [&](int c) { return n * static_cast<std::size_t>(c) / num_chunks; };
  if (num_chunks == 1) {
    body(0, 0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(num_chunks);
  auto guarded = [&](int c) {
    try {
      body(c, bound(c), bound(c + 1));
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (int c = 1; c < num_chunks; ++c) threads.emplace_back(guarded, c);
  guarded(0);
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace morley
