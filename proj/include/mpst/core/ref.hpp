#pragma once

#include <memory>
#include <utility>

namespace mpst {

/// Shared handle to an immutable tree node. Copies share the node; equality
/// is structural (compares the pointees), so trees can be compared with `==`.
template <class T>
class Ref {
 public:
  Ref() = default;
  Ref(T value) : node_(std::make_shared<const T>(std::move(value))) {}  // NOLINT implicit

  const T& operator*() const { return *node_; }
  const T* operator->() const { return node_.get(); }
  const T* get() const { return node_.get(); }
  explicit operator bool() const { return static_cast<bool>(node_); }

  bool same_node(const Ref& other) const { return node_ == other.node_; }

  friend bool operator==(const Ref& a, const Ref& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    return *a.node_ == *b.node_;
  }

 private:
  std::shared_ptr<const T> node_;
};

}  // namespace mpst
