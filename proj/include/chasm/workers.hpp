#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace chasm {

/**
 * Fixed set of worker threads running indexed task batches.
 *
 * run(n, fn) calls fn(i) for i in [0, n) and returns once all calls finish.
 * Task i always goes to worker i % size(), so the assignment is fixed. With a
 * single worker everything runs inline on the caller thread.
 */
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers = 1);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return n_; }
  void run(std::size_t n_tasks, const std::function<void(std::size_t)>& fn);

 private:
  void loop(std::size_t id);

  std::size_t n_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t n_tasks_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace chasm
