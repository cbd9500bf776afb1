#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

namespace gconv {

/// Neumaier's variant of Kahan summation.
template <std::floating_point T>
class CompensatedSum {
 public:
  void add(T x) noexcept {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  T value() const noexcept { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

/// Componentwise compensated accumulation of vectors.
template <std::floating_point T>
class VectorAccumulator {
 public:
  explicit VectorAccumulator(std::size_t dim) : parts_(dim) {}

  void add(std::span<const T> v, T scale = T(1)) noexcept {
    for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i].add(scale * v[i]);
  }

  std::size_t size() const noexcept { return parts_.size(); }

  std::vector<T> value() const {
    std::vector<T> out(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = parts_[i].value();
    return out;
  }

  void write(std::span<T> out) const noexcept {
    for (std::size_t i = 0; i < parts_.size(); ++i) out[i] = parts_[i].value();
  }

 private:
  std::vector<CompensatedSum<T>> parts_;
};

inline double norm2(std::span<const double> v) noexcept {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm_inf(std::span<const double> v) noexcept {
  double s = 0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace gconv
