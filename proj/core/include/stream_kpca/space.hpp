#pragma once

#include <cstddef>
#include <utility>

namespace stream_kpca {

/// Tracks the logical number of scalar entries held by a training run. Trainers
/// take a Lease for every buffer they own; peak() is the high-water mark.
/// Single-writer, like the trainers that use it.
class EntryCounter {
 public:
  class Lease {
   public:
    Lease() = default;
    Lease(EntryCounter* owner, std::size_t entries) : owner_(owner), entries_(entries) {
      if (owner_ != nullptr) owner_->acquire(entries_);
    }
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;
    Lease(Lease&& other) noexcept
        : owner_(std::exchange(other.owner_, nullptr)), entries_(other.entries_) {}
    Lease& operator=(Lease&& other) noexcept {
      if (this != &other) {
        release();
        owner_ = std::exchange(other.owner_, nullptr);
        entries_ = other.entries_;
      }
      return *this;
    }
    ~Lease() { release(); }

    void release() {
      if (owner_ != nullptr) owner_->give_back(entries_);
      owner_ = nullptr;
    }
    std::size_t entries() const { return entries_; }

   private:
    EntryCounter* owner_ = nullptr;
    std::size_t entries_ = 0;
  };

  std::size_t current() const { return current_; }
  std::size_t peak() const { return peak_; }
  void reset() { current_ = peak_ = 0; }

 private:
  void acquire(std::size_t n) {
    current_ += n;
    if (current_ > peak_) peak_ = current_;
  }
  void give_back(std::size_t n) { current_ -= n; }

  std::size_t current_ = 0;
  std::size_t peak_ = 0;
};

// A null counter yields inert leases, so trainers can always call this.
inline EntryCounter::Lease hold(EntryCounter* counter, std::size_t entries) {
  return EntryCounter::Lease(counter, entries);
}

}  // namespace stream_kpca
