#include "hyperdist/parallel.hpp"

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hyperdist {

unsigned default_jobs() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t n, unsigned jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = default_jobs();
  if (n == 0) return;
  if (jobs > n) jobs = static_cast<unsigned>(n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  const std::size_t chunk = n / jobs;
  const std::size_t extra = n % jobs;
  std::size_t begin = 0;
  for (unsigned w = 0; w < jobs; ++w) {
    std::size_t end = begin + chunk + (w < extra ? 1 : 0);
    workers.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
    begin = end;
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hyperdist
