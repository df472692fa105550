#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "vanetagg/error.hpp"

namespace vanetagg::sim {

// Time-ordered actions; equal times run in insertion order.
class EventQueue {
 public:
  using Action = std::function<void(double now)>;

  void schedule(double time, Action action) {
    if (time < now_) fail(ErrorCode::kInvalidArgument, "event scheduled in the past");
    heap_.push(Entry{time, seq_++, std::move(action)});
  }

  bool empty() const { return heap_.empty(); }
  double now() const { return now_; }
  std::size_t size() const { return heap_.size(); }

  // Pops and runs the earliest action. Returns false when empty.
  bool step() {
    if (heap_.empty()) return false;
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.time;
    e.action(now_);
    return true;
  }

  void run_until_empty() {
    while (step()) {
    }
  }

  void clear() { heap_ = {}; }

 private:
  struct Entry {
    double time;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t seq_ = 0;
  double now_ = 0;
};

}  // namespace vanetagg::sim
