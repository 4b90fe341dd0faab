#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace patchmg
{
  /// Minimal persistent worker pool with a barrier after every job. One
  /// worker runs jobs inline on the calling thread, so single-worker
  /// execution involves no threads at all.
  class ThreadPool
  {
  public:
    explicit ThreadPool(int n_workers)
      : n(n_workers < 1 ? 1 : n_workers)
    {
      for (int w = 1; w < n; ++w)
        threads.emplace_back([this, w] { worker_loop(w); });
    }

    ~ThreadPool()
    {
      {
        std::unique_lock<std::mutex> lock(mutex);
        stopping = true;
        ++generation;
      }
      cv_start.notify_all();
      for (auto &t : threads)
        t.join();
    }

    int size() const
    {
      return n;
    }

    /// Statically partition [0, count) and run fn(worker, begin, end) on
    /// every worker; blocks until all are done.
    template <typename F>
    void parallel_for(long count, F &&fn)
    {
      if (n == 1 || count <= 1)
        {
          fn(0, 0, count);
          return;
        }
      job = [&fn, count, this](int w) {
        const long chunk = (count + n - 1) / n;
        const long begin = std::min<long>(count, w * chunk);
        const long end   = std::min<long>(count, begin + chunk);
        if (begin < end)
          fn(w, begin, end);
      };
      {
        std::unique_lock<std::mutex> lock(mutex);
        pending = n - 1;
        ++generation;
      }
      cv_start.notify_all();
      job(0);
      std::unique_lock<std::mutex> lock(mutex);
      cv_done.wait(lock, [this] { return pending == 0; });
    }

  private:
    void worker_loop(int w)
    {
      std::uint64_t seen = 0;
      while (true)
        {
          {
            std::unique_lock<std::mutex> lock(mutex);
            cv_start.wait(lock, [this, seen] { return generation != seen || stopping; });
            if (stopping)
              return;
            seen = generation;
          }
          job(w);
          {
            std::unique_lock<std::mutex> lock(mutex);
            if (--pending == 0)
              cv_done.notify_all();
          }
        }
    }

    int                          n;
    std::vector<std::thread>     threads;
    std::function<void(int)>     job;
    std::mutex                   mutex;
    std::condition_variable      cv_start, cv_done;
    std::uint64_t                generation = 0;
    int                          pending    = 0;
    bool                         stopping   = false;
  };
} // namespace patchmg
