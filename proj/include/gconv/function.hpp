#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gconv/group.hpp"
#include "gconv/measure.hpp"
#include "gconv/summation.hpp"

namespace gconv {

/// Finitely supported map from a group into R^m.
///
/// Points are kept sorted lexicographically with values stored flat
/// (row i at [i*vdim, (i+1)*vdim)). Exact-zero vectors are never stored, so
/// the key set is exactly the support.
class SampledFunction {
 public:
  SampledFunction(GroupSpace group, std::size_t vdim) : group_(std::move(group)), vdim_(vdim) {
    require(vdim_ >= 1, ErrorKind::InvalidArgument, "value dimension must be positive");
  }

  /// Takes parallel point/value arrays in any order. Duplicate points are an
  /// error; zero vectors are dropped.
  SampledFunction(GroupSpace group, std::size_t vdim, std::vector<GroupPoint> points, std::vector<double> values)
      : SampledFunction(std::move(group), vdim) {
    require(values.size() == points.size() * vdim_, ErrorKind::DimensionMismatch,
            "expected " + std::to_string(points.size() * vdim_) + " values, got " + std::to_string(values.size()));
    for (const auto& p : points) group_.check(p);

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!std::is_sorted(points.begin(), points.end())) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    }
    points_.reserve(points.size());
    values_.reserve(values.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t i = order[k];
      if (k > 0 && points[order[k - 1]] == points[i]) {
        fail(ErrorKind::InvalidArgument, "duplicate support point " + points[i].to_string());
      }
      std::span<const double> v(values.data() + i * vdim_, vdim_);
      if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) continue;
      points_.push_back(points[i]);
      values_.insert(values_.end(), v.begin(), v.end());
    }
  }

  static SampledFunction from_map(GroupSpace group, std::size_t vdim,
                                  const std::map<GroupPoint, std::vector<double>>& entries) {
    std::vector<GroupPoint> pts;
    std::vector<double> vals;
    for (const auto& [p, v] : entries) {
      require(v.size() == vdim, ErrorKind::DimensionMismatch,
              "value at " + p.to_string() + " has length " + std::to_string(v.size()));
      pts.push_back(p);
      vals.insert(vals.end(), v.begin(), v.end());
    }
    return SampledFunction(std::move(group), vdim, std::move(pts), std::move(vals));
  }

  /// Scalar function from (point, value) pairs.
  static SampledFunction scalar(GroupSpace group, const std::vector<std::pair<GroupPoint, double>>& entries) {
    std::vector<GroupPoint> pts;
    std::vector<double> vals;
    for (const auto& [p, v] : entries) {
      pts.push_back(p);
      vals.push_back(v);
    }
    return SampledFunction(std::move(group), 1, std::move(pts), std::move(vals));
  }

  /// Scalar function on a rank-1 group with values[i] placed at offset + i.
  static SampledFunction from_sequence(GroupSpace group, std::int64_t offset, const std::vector<double>& values) {
    require(group.rank() == 1, ErrorKind::SpaceMismatch, "from_sequence needs a rank-1 group");
    std::vector<GroupPoint> pts;
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::int64_t k = offset + static_cast<std::int64_t>(i);
      if (group.kind() == GroupKind::Cyclic) k = detail::mod(k, group.modulus());
      pts.push_back(GroupPoint{k});
    }
    return SampledFunction(std::move(group), 1, std::move(pts), values);
  }

  /// Unit-mass point function at x (scaled by `value`).
  static SampledFunction delta(const GroupSpace& group, const GroupPoint& x, double value = 1.0) {
    return SampledFunction(group, 1, {x}, {value});
  }

  const GroupSpace& group() const noexcept { return group_; }
  std::size_t vdim() const noexcept { return vdim_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  std::span<const GroupPoint> points() const noexcept { return points_; }
  const GroupPoint& point(std::size_t i) const { return points_[i]; }
  std::span<const double> value(std::size_t i) const noexcept { return {values_.data() + i * vdim_, vdim_}; }
  std::span<const double> raw_values() const noexcept { return values_; }

  /// Stored value at x, or nullopt outside the support.
  std::optional<std::span<const double>> lookup(const GroupPoint& x) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it == points_.end() || *it != x) return std::nullopt;
    return value(static_cast<std::size_t>(it - points_.begin()));
  }

  std::vector<double> eval(const GroupPoint& x) const {
    group_.check(x);
    if (auto v = lookup(x)) return {v->begin(), v->end()};
    return std::vector<double>(vdim_, 0.0);
  }

  friend bool operator==(const SampledFunction&, const SampledFunction&) = default;

 private:
  GroupSpace group_;
  std::size_t vdim_;
  std::vector<GroupPoint> points_;
  std::vector<double> values_;
};

inline std::vector<double> eval(const SampledFunction& f, const GroupPoint& x) { return f.eval(x); }

namespace detail {
inline void check_measure(const SampledFunction& f, const Measure& mu) {
  require(f.group() == mu.group(), ErrorKind::SpaceMismatch,
          "function lives on " + f.group().to_string() + " but measure on " + mu.group().to_string());
}

inline void check_compatible(const SampledFunction& f, const SampledFunction& g) {
  require(f.group() == g.group(), ErrorKind::SpaceMismatch,
          "group mismatch: " + f.group().to_string() + " vs " + g.group().to_string());
  require(f.vdim() == g.vdim(), ErrorKind::DimensionMismatch,
          "vdim mismatch: " + std::to_string(f.vdim()) + " vs " + std::to_string(g.vdim()));
}
}  // namespace detail

/// Sum over the support of weight(x) * f(x).
inline std::vector<double> integral(const SampledFunction& f, const Measure& mu) {
  detail::check_measure(f, mu);
  VectorAccumulator<double> acc(f.vdim());
  for (std::size_t i = 0; i < f.size(); ++i) acc.add(f.value(i), mu.weight(f.point(i)));
  return acc.value();
}

/// Sum over the support of weight(x) * |f(x)|_2.
inline double norm_integral(const SampledFunction& f, const Measure& mu) {
  detail::check_measure(f, mu);
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < f.size(); ++i) acc.add(mu.weight(f.point(i)) * norm2(f.value(i)));
  return acc.value();
}

/// Pointwise a*f + b*g with exact zeros pruned.
inline SampledFunction lin_comb(double a, const SampledFunction& f, double b, const SampledFunction& g) {
  detail::check_compatible(f, g);
  const std::size_t m = f.vdim();
  std::vector<GroupPoint> pts;
  std::vector<double> vals;
  std::size_t i = 0, j = 0;
  auto emit = [&](const GroupPoint& p, std::span<const double> u, std::span<const double> w) {
    pts.push_back(p);
    for (std::size_t k = 0; k < m; ++k) vals.push_back((u.empty() ? 0.0 : a * u[k]) + (w.empty() ? 0.0 : b * w[k]));
  };
  while (i < f.size() || j < g.size()) {
    if (j == g.size() || (i < f.size() && f.point(i) < g.point(j))) {
      emit(f.point(i), f.value(i), {});
      ++i;
    } else if (i == f.size() || g.point(j) < f.point(i)) {
      emit(g.point(j), {}, g.value(j));
      ++j;
    } else {
      emit(f.point(i), f.value(i), g.value(j));
      ++i;
      ++j;
    }
  }
  return SampledFunction(f.group(), m, std::move(pts), std::move(vals));
}

inline SampledFunction scale(double c, const SampledFunction& f) {
  std::vector<GroupPoint> pts(f.points().begin(), f.points().end());
  std::vector<double> vals(f.raw_values().begin(), f.raw_values().end());
  for (double& v : vals) v *= c;
  return SampledFunction(f.group(), f.vdim(), std::move(pts), std::move(vals));
}

/// x -> f(x - a): every support point p moves to p + a.
inline SampledFunction translate(const SampledFunction& f, const GroupPoint& a) {
  std::vector<GroupPoint> pts;
  for (const auto& p : f.points()) pts.push_back(f.group().add(p, a));
  return SampledFunction(f.group(), f.vdim(), std::move(pts),
                         std::vector<double>(f.raw_values().begin(), f.raw_values().end()));
}

/// x -> f(-x).
inline SampledFunction reflect(const SampledFunction& f) {
  std::vector<GroupPoint> pts;
  for (const auto& p : f.points()) pts.push_back(f.group().neg(p));
  return SampledFunction(f.group(), f.vdim(), std::move(pts),
                         std::vector<double>(f.raw_values().begin(), f.raw_values().end()));
}

/// Largest componentwise difference between two functions over the union of supports.
inline double max_abs_difference(const SampledFunction& f, const SampledFunction& g) {
  return norm_inf(lin_comb(1.0, f, -1.0, g).raw_values());
}

inline double max_abs_value(const SampledFunction& f) { return norm_inf(f.raw_values()); }

/// Scalar function on a lattice given by closed-form value and derivatives.
///
/// Centered at the origin and zero outside the open ball of `support_radius`.
/// `hessian` is optional and writes a row-major d x d matrix.
struct SymbolicFunction {
  using Point = std::span<const double>;
  using Out = std::span<double>;

  GroupSpace group;
  double support_radius;
  std::function<double(Point)> value;
  std::function<void(Point, Out)> gradient;
  std::function<void(Point, Out)> hessian;

  /// Highest derivative order with a closed form.
  int derivative_order() const noexcept { return hessian ? 2 : (gradient ? 1 : 0); }
};

namespace detail {
inline void check_symbolic(const SymbolicFunction& s) {
  require(s.group.kind() == GroupKind::Lattice, ErrorKind::SpaceMismatch,
          "symbolic functions live on lattices, got " + s.group.to_string());
  require(static_cast<bool>(s.value), ErrorKind::InvalidArgument, "symbolic function without evaluator");
}

template <class Fn>
SampledFunction sample_with(const SymbolicFunction& s, std::size_t vdim, Fn&& fill) {
  check_symbolic(s);
  std::vector<GroupPoint> pts;
  std::vector<double> vals;
  std::vector<double> out(vdim);
  for (const auto& p : s.group.ball(s.group.zero(), s.support_radius)) {
    const auto x = s.group.embed(p);
    fill(std::span<const double>(x), std::span<double>(out));
    pts.push_back(p);
    vals.insert(vals.end(), out.begin(), out.end());
  }
  return SampledFunction(s.group, vdim, std::move(pts), std::move(vals));
}
}  // namespace detail

/// Values of a symbolic function on its lattice.
inline SampledFunction sample(const SymbolicFunction& s) {
  return detail::sample_with(s, 1, [&](auto x, auto out) { out[0] = s.value(x); });
}

/// Analytic gradient sampled on the lattice, as a 1 x d row (vdim d).
inline SampledFunction sample_gradient(const SymbolicFunction& s) {
  require(s.derivative_order() >= 1, ErrorKind::Precondition, "symbolic function has no gradient");
  return detail::sample_with(s, s.group.rank(), [&](auto x, auto out) { s.gradient(x, out); });
}

/// t -> D_t s (v).
inline SampledFunction sample_directional(const SymbolicFunction& s, std::span<const double> v) {
  require(s.derivative_order() >= 1, ErrorKind::Precondition, "symbolic function has no gradient");
  const std::size_t d = s.group.rank();
  require(v.size() == d, ErrorKind::DimensionMismatch, "direction has wrong length");
  std::vector<double> grad(d);
  return detail::sample_with(s, 1, [&](auto x, auto out) {
    s.gradient(x, grad);
    double acc = 0;
    for (std::size_t j = 0; j < d; ++j) acc += grad[j] * v[j];
    out[0] = acc;
  });
}

/// t -> D^2_t s (v, w).
inline SampledFunction sample_second_directional(const SymbolicFunction& s, std::span<const double> v,
                                                 std::span<const double> w) {
  require(s.derivative_order() >= 2, ErrorKind::Precondition, "symbolic function has no second derivative");
  const std::size_t d = s.group.rank();
  require(v.size() == d && w.size() == d, ErrorKind::DimensionMismatch, "direction has wrong length");
  std::vector<double> hess(d * d);
  return detail::sample_with(s, 1, [&](auto x, auto out) {
    s.hessian(x, hess);
    double acc = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) acc += v[i] * hess[i * d + j] * w[j];
    out[0] = acc;
  });
}

}  // namespace gconv
