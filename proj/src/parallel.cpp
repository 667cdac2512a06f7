#include "salientcut/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace salientcut {

namespace {

thread_local bool t_inside_worker = false;

class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers) : workers_(workers < 1 ? 1 : workers) {
    for (std::size_t i = 1; i < workers_; ++i) threads_.emplace_back([this] { loop(); });
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return workers_; }

  void run(std::size_t chunks, const std::function<void(std::size_t)>& fn) {
    if (workers_ == 1 || chunks < 2 || t_inside_worker) {
      for (std::size_t c = 0; c < chunks; ++c) fn(c);
      return;
    }
    std::lock_guard submit(submit_mutex_);
    {
      std::lock_guard lock(mutex_);
      job_ = &fn;
      chunks_ = chunks;
      next_.store(0);
      pending_ = threads_.size();
      ++generation_;
    }
    wake_.notify_all();
    t_inside_worker = true;
    drain(fn, chunks);
    t_inside_worker = false;
    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void drain(const std::function<void(std::size_t)>& fn, std::size_t chunks) {
    for (;;) {
      const std::size_t c = next_.fetch_add(1);
      if (c >= chunks) break;
      fn(c);
    }
  }

  void loop() {
    t_inside_worker = true;
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t)>* job = nullptr;
      std::size_t chunks = 0;
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        job = job_;
        chunks = chunks_;
      }
      drain(*job, chunks);
      {
        std::lock_guard lock(mutex_);
        if (--pending_ == 0) done_.notify_one();
      }
    }
  }

  std::size_t workers_;
  std::vector<std::thread> threads_;
  std::mutex submit_mutex_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t chunks_ = 0;
  std::size_t pending_ = 0;
  std::uint64_t generation_ = 0;
  std::atomic<std::size_t> next_{0};
  bool stop_ = false;
};

std::mutex g_pool_mutex;
std::unique_ptr<WorkerPool> g_pool;

WorkerPool& pool() {
  std::lock_guard lock(g_pool_mutex);
  if (!g_pool) g_pool = std::make_unique<WorkerPool>(worker_count_from_env());
  return *g_pool;
}

}  // namespace

void set_worker_count(std::size_t workers) {
  std::lock_guard lock(g_pool_mutex);
  if (workers < 1) workers = 1;
  if (g_pool && g_pool->size() == workers) return;
  g_pool.reset();
  g_pool = std::make_unique<WorkerPool>(workers);
}

std::size_t worker_count() { return pool().size(); }

std::size_t worker_count_from_env() {
  const char* env = std::getenv("SALIENTCUT_THREADS");
  if (env == nullptr) return 1;
  try {
    const long v = std::stol(env);
    if (v >= 1 && v <= 1024) return static_cast<std::size_t>(v);
  } catch (...) {
  }
  return 1;
}

namespace detail {
void run_chunks(std::size_t chunks, const std::function<void(std::size_t)>& fn) {
  pool().run(chunks, fn);
}
}  // namespace detail

}  // namespace salientcut
