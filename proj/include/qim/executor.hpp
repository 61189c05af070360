#pragma once

#include <cstddef>
#include <functional>

namespace qim {

/// Runs independent tasks 0..n-1. Each task must write only to its own output slot, so results
/// do not depend on the worker count or on scheduling.
class Executor {
 public:
  explicit Executor(unsigned workers = 1);

  unsigned workers() const { return workers_; }
  /// Blocks until every task has finished; rethrows the first exception raised by a task.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) const;

 private:
  unsigned workers_;
};

}  // namespace qim
