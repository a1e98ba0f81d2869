#pragma once
/**
 * @file async_monitor.hpp
 * @brief Hazard monitor running on its own thread; the control loop reads its latest bank.
 *
 * The worker is the only writer of the buffer bank. Results are published as whole copies under a
 * mutex, so a reader never observes a partially written frame.
 */

#include <argus/gate.hpp>

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace argus::sim {

struct MonitorJob
{
  BevSnapshot curr;
  BevSnapshot prev;
  Trajectory ads_trajectory;
  bool in_takeover{false};
  bool reset_recovery{false};  ///< a takeover fired on the previous frame
};

struct MonitorResult
{
  HazardReport report;
  BufferBank bank;
};

class AsyncMonitor
{
public:
  AsyncMonitor(const MonitorConfig& cfg, const PredictionParams& pp)
  : cfg_(cfg), pp_(pp), bank_(cfg), worker_([this](std::stop_token st) { run(st); })
  {
  }

  AsyncMonitor(const AsyncMonitor&) = delete;
  AsyncMonitor& operator=(const AsyncMonitor&) = delete;

  ~AsyncMonitor()
  {
    worker_.request_stop();
    cv_.notify_all();
  }

  void submit(MonitorJob job)
  {
    {
      std::lock_guard lock(mu_);
      jobs_.push_back(std::move(job));
    }
    cv_.notify_all();
  }

  /// Waits up to `timeout` for the result of `frame`; returns the latest published result.
  template <typename Rep, typename Period>
  std::optional<MonitorResult> wait_for(int frame, std::chrono::duration<Rep, Period> timeout)
  {
    std::unique_lock lock(mu_);
    done_cv_.wait_for(lock, timeout, [&] {
      return (latest_ && latest_->report.frame >= frame) || error_ != nullptr;
    });
    if (error_) {
      std::rethrow_exception(error_);
    }
    return latest_;
  }

  std::optional<MonitorResult> latest()
  {
    std::lock_guard lock(mu_);
    return latest_;
  }

private:
  void run(std::stop_token st)
  {
    while (true) {
      MonitorJob job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, st, [&] { return !jobs_.empty(); });
        if (st.stop_requested()) {
          return;
        }
        job = std::move(jobs_.front());
        jobs_.pop_front();
      }
      try {
        if (job.reset_recovery) {
          bank_.reset_recovery();
        }
        const PredictedBoxSet boxes = predict(job.curr, job.prev, job.ads_trajectory, pp_);
        HazardReport report = evaluate(boxes, job.curr, bank_, cfg_);
        update_buffers(report, bank_, job.in_takeover);
        {
          std::lock_guard lock(mu_);
          latest_ = MonitorResult{std::move(report), bank_};
        }
      } catch (...) {
        std::lock_guard lock(mu_);
        error_ = std::current_exception();
      }
      done_cv_.notify_all();
    }
  }

  MonitorConfig cfg_;
  PredictionParams pp_;
  BufferBank bank_;  // touched by the worker only
  std::mutex mu_;
  std::condition_variable_any cv_;
  std::condition_variable done_cv_;
  std::deque<MonitorJob> jobs_;
  std::optional<MonitorResult> latest_;
  std::exception_ptr error_;
  std::jthread worker_;  // last member: starts after everything above is constructed
};

}  // namespace argus::sim
