#include "chasm/workers.hpp"

#include "chasm/errors.hpp"

namespace chasm {

WorkerPool::WorkerPool(std::size_t workers) : n_(workers) {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  // worker 0 is the calling thread
  for (std::size_t id = 1; id < n_; ++id) threads_.emplace_back([this, id] { loop(id); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(std::size_t n_tasks, const std::function<void(std::size_t)>& fn) {
  if (n_ == 1 || n_tasks <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  {
    std::lock_guard lock(mu_);
    job_ = &fn;
    n_tasks_ = n_tasks;
    pending_ = n_ - 1;
    error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();

  std::exception_ptr local;
  try {
    for (std::size_t i = 0; i < n_tasks; i += n_) fn(i);
  } catch (...) {
    local = std::current_exception();
  }

  std::unique_lock lock(mu_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  job_ = nullptr;
  if (local) std::rethrow_exception(local);
  if (error_) std::rethrow_exception(error_);
}

void WorkerPool::loop(std::size_t id) {
  std::size_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t)>* job = nullptr;
    std::size_t n_tasks = 0;
    {
      std::unique_lock lock(mu_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
      n_tasks = n_tasks_;
    }
    std::exception_ptr err;
    try {
      for (std::size_t i = id; i < n_tasks; i += n_) (*job)(i);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mu_);
      if (err && !error_) error_ = err;
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }
}

}  // namespace chasm
