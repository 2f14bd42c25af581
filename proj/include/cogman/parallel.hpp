#pragma once
#include <exception>
#include <mutex>

namespace cogman {

// Exceptions must not leave an OpenMP region. Loop bodies run through
// guard(); the first exception is kept and rethrown after the loop.
class ExceptionSlot {
 public:
  template <typename F>
  void guard(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!first_) first_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr first_;
};

}  // namespace cogman
