#pragma once

#include <memory>
#include <utility>

namespace gymkit::detail {

// Heap-allocated value with value semantics, used to break recursion in the
// Space and Value variants. Never empty after construction.
template <typename T>
class Recursive {
 public:
  Recursive(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Recursive(const Recursive& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Recursive(Recursive&&) noexcept = default;
  Recursive& operator=(const Recursive& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Recursive& operator=(Recursive&&) noexcept = default;
  ~Recursive() = default;

  const T& get() const { return *ptr_; }
  T& get() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

  friend bool operator==(const Recursive& a, const Recursive& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

}  // namespace gymkit::detail
