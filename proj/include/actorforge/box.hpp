// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <utility>

namespace actorforge {

/// Heap-allocated value with value semantics, for recursive AST nodes.
template <class T>
class box {
 public:
  box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(implicit)
  box(const box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  box(box&&) noexcept = default;
  box& operator=(const box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  box& operator=(box&&) noexcept = default;
  ~box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const box& a, const box& b) { return *a == *b; }

 private:
  std::unique_ptr<T> ptr_;
};

}  // namespace actorforge
