#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gconv/error.hpp"

namespace gconv {

/// Largest coordinate count a GroupPoint can carry (lattices up to d = 4).
inline constexpr std::size_t kMaxRank = 4;

/// Integer coordinate vector identifying an element of a GroupSpace.
///
/// Storage is inline; unused slots are kept at zero so that defaulted
/// comparison is lexicographic over the used coordinates.
class GroupPoint {
 public:
  GroupPoint() = default;

  GroupPoint(std::initializer_list<std::int64_t> coords)
      : GroupPoint(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

  explicit GroupPoint(std::span<const std::int64_t> coords) {
    require(coords.size() <= kMaxRank, ErrorKind::InvalidArgument,
            "GroupPoint rank " + std::to_string(coords.size()) + " exceeds " +
                std::to_string(kMaxRank));
    rank_ = static_cast<std::uint8_t>(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords_[i] = coords[i];
  }

  static GroupPoint zeros(std::size_t rank) {
    GroupPoint p;
    require(rank <= kMaxRank, ErrorKind::InvalidArgument, "GroupPoint rank too large");
    p.rank_ = static_cast<std::uint8_t>(rank);
    return p;
  }

  std::size_t rank() const noexcept { return rank_; }
  std::int64_t operator[](std::size_t i) const noexcept { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) noexcept { return coords_[i]; }
  std::span<const std::int64_t> coords() const noexcept { return {coords_.data(), rank_}; }

  friend auto operator<=>(const GroupPoint&, const GroupPoint&) = default;
  friend bool operator==(const GroupPoint&, const GroupPoint&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < rank_; ++i) {
      if (i) s += ',';
      s += std::to_string(coords_[i]);
    }
    return s + ")";
  }

 private:
  std::array<std::int64_t, kMaxRank> coords_{};
  std::uint8_t rank_ = 0;
};

struct GroupPointHash {
  std::size_t operator()(const GroupPoint& p) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ p.rank();
    for (auto c : p.coords()) {
      h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

enum class GroupKind { Integers, Cyclic, Lattice, Dihedral };

namespace detail {
inline std::int64_t mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}
}  // namespace detail

/// A carrier with addition, negation and subtraction.
///
/// Integers and Cyclic(n) are rank-1. Lattice(d, h) is Z^d with the embedding
/// k -> k*h per axis. Dihedral(n) stores (rot, flip) encoding r^rot * s^flip,
/// with r^n = s^2 = e and s r s = r^-1; subtraction is x * t^-1.
class GroupSpace {
 public:
  static GroupSpace integers() { return GroupSpace(GroupKind::Integers, 0, 1, 1.0); }

  static GroupSpace cyclic(std::int64_t n) {
    require(n >= 1, ErrorKind::InvalidArgument, "Cyclic(n) needs n >= 1");
    return GroupSpace(GroupKind::Cyclic, n, 1, 1.0);
  }

  static GroupSpace lattice(std::size_t d, double h) {
    require(d >= 1 && d <= kMaxRank, ErrorKind::InvalidArgument,
            "Lattice dimension must be in [1, " + std::to_string(kMaxRank) + "]");
    require(std::isfinite(h) && h > 0, ErrorKind::InvalidArgument, "Lattice spacing must be positive");
    return GroupSpace(GroupKind::Lattice, 0, d, h);
  }

  static GroupSpace dihedral(std::int64_t n) {
    require(n >= 1, ErrorKind::InvalidArgument, "Dihedral(n) needs n >= 1");
    return GroupSpace(GroupKind::Dihedral, n, 2, 1.0);
  }

  GroupKind kind() const noexcept { return kind_; }
  /// n for Cyclic and Dihedral, 0 otherwise.
  std::int64_t modulus() const noexcept { return n_; }
  /// Number of coordinates in a point.
  std::size_t rank() const noexcept { return rank_; }
  /// Real dimension of the embedding (lattices and Z only).
  std::size_t dim() const noexcept { return kind_ == GroupKind::Lattice ? rank_ : 1; }
  double spacing() const noexcept { return h_; }

  bool is_abelian() const noexcept { return kind_ != GroupKind::Dihedral || n_ <= 2; }
  bool is_finite() const noexcept { return kind_ == GroupKind::Cyclic || kind_ == GroupKind::Dihedral; }
  bool has_metric() const noexcept { return kind_ == GroupKind::Integers || kind_ == GroupKind::Lattice; }

  friend bool operator==(const GroupSpace&, const GroupSpace&) = default;

  bool contains(const GroupPoint& p) const noexcept {
    if (p.rank() != rank_) return false;
    switch (kind_) {
      case GroupKind::Integers:
      case GroupKind::Lattice:
        return true;
      case GroupKind::Cyclic:
        return p[0] >= 0 && p[0] < n_;
      case GroupKind::Dihedral:
        return p[0] >= 0 && p[0] < n_ && (p[1] == 0 || p[1] == 1);
    }
    return false;
  }

  void check(const GroupPoint& p) const {
    if (!contains(p)) fail(ErrorKind::SpaceMismatch, "point " + p.to_string() + " is not in " + to_string());
  }

  GroupPoint zero() const { return GroupPoint::zeros(rank_); }

  /// Builds a point, reducing coordinates where the group is periodic.
  GroupPoint point(std::initializer_list<std::int64_t> coords) const {
    GroupPoint p(coords);
    require(p.rank() == rank_, ErrorKind::SpaceMismatch,
            "point " + p.to_string() + " has wrong rank for " + to_string());
    if (kind_ == GroupKind::Cyclic || kind_ == GroupKind::Dihedral) p[0] = detail::mod(p[0], n_);
    check(p);
    return p;
  }

  /// Group operation a + b (the product a*b for Dihedral).
  GroupPoint add(const GroupPoint& a, const GroupPoint& b) const {
    check(a);
    check(b);
    GroupPoint r = a;
    switch (kind_) {
      case GroupKind::Integers:
      case GroupKind::Lattice:
        for (std::size_t i = 0; i < rank_; ++i) r[i] = a[i] + b[i];
        break;
      case GroupKind::Cyclic:
        r[0] = detail::mod(a[0] + b[0], n_);
        break;
      case GroupKind::Dihedral:
        // r^a s^fa r^b s^fb = r^(a + (fa ? -b : b)) s^(fa xor fb)
        r[0] = detail::mod(a[1] ? a[0] - b[0] : a[0] + b[0], n_);
        r[1] = a[1] ^ b[1];
        break;
    }
    return r;
  }

  GroupPoint neg(const GroupPoint& a) const {
    check(a);
    GroupPoint r = a;
    switch (kind_) {
      case GroupKind::Integers:
      case GroupKind::Lattice:
        for (std::size_t i = 0; i < rank_; ++i) r[i] = -a[i];
        break;
      case GroupKind::Cyclic:
        r[0] = detail::mod(-a[0], n_);
        break;
      case GroupKind::Dihedral:
        // reflections are involutions
        if (!a[1]) r[0] = detail::mod(-a[0], n_);
        break;
    }
    return r;
  }

  /// x - t; for Dihedral this is x * t^-1.
  GroupPoint sub(const GroupPoint& x, const GroupPoint& t) const { return add(x, neg(t)); }

  /// All elements of a finite group in lexicographic order.
  std::vector<GroupPoint> elements() const {
    require(is_finite(), ErrorKind::InvalidArgument, to_string() + " is infinite");
    std::vector<GroupPoint> out;
    for (std::int64_t k = 0; k < n_; ++k) {
      if (kind_ == GroupKind::Cyclic) {
        out.push_back(GroupPoint{k});
      } else {
        out.push_back(GroupPoint{k, 0});
        out.push_back(GroupPoint{k, 1});
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Real coordinates of a point of Z or a lattice.
  std::vector<double> embed(const GroupPoint& p) const {
    require(has_metric(), ErrorKind::SpaceMismatch, to_string() + " has no real embedding");
    check(p);
    std::vector<double> x(rank_);
    for (std::size_t i = 0; i < rank_; ++i) x[i] = static_cast<double>(p[i]) * h_;
    return x;
  }

  /// Euclidean norm of the embedded point.
  double norm(const GroupPoint& p) const {
    double s = 0;
    for (double v : embed(p)) s += v * v;
    return std::sqrt(s);
  }

  double distance(const GroupPoint& a, const GroupPoint& b) const { return norm(sub(a, b)); }

  /// Points p with distance(p, center) < radius, lexicographically sorted.
  std::vector<GroupPoint> ball(const GroupPoint& center, double radius) const {
    require(has_metric(), ErrorKind::SpaceMismatch, to_string() + " has no metric");
    check(center);
    std::vector<GroupPoint> out;
    if (!(radius > 0)) return out;
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / h_));
    GroupPoint offset = zero();
    for (std::size_t i = 0; i < rank_; ++i) offset[i] = -reach;
    while (true) {
      double s = 0;
      for (std::size_t i = 0; i < rank_; ++i) {
        const double v = static_cast<double>(offset[i]) * h_;
        s += v * v;
      }
      if (std::sqrt(s) < radius) out.push_back(add(center, offset));
      std::size_t axis = rank_;
      while (axis > 0) {
        --axis;
        if (offset[axis] < reach) {
          ++offset[axis];
          break;
        }
        offset[axis] = -reach;
        if (axis == 0) return out;
      }
    }
  }

  /// Unit step along one lattice axis (Integers: axis 0).
  GroupPoint unit(std::size_t axis) const {
    require(has_metric() && axis < rank_, ErrorKind::InvalidArgument, "no such axis");
    GroupPoint e = zero();
    e[axis] = 1;
    return e;
  }

  std::string to_string() const;

 private:
  GroupSpace(GroupKind kind, std::int64_t n, std::size_t rank, double h)
      : kind_(kind), n_(n), rank_(rank), h_(h) {}

  GroupKind kind_;
  std::int64_t n_;
  std::size_t rank_;
  double h_;
};

namespace detail {
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace detail

inline std::string GroupSpace::to_string() const {
  switch (kind_) {
    case GroupKind::Integers:
      return "Z";
    case GroupKind::Cyclic:
      return "Zn:" + std::to_string(n_);
    case GroupKind::Lattice:
      return "lattice:" + std::to_string(rank_) + ":" + detail::format_real(h_);
    case GroupKind::Dihedral:
      return "D" + std::to_string(n_);
  }
  return "?";
}

inline GroupPoint sub(const GroupSpace& g, const GroupPoint& x, const GroupPoint& t) { return g.sub(x, t); }
inline GroupPoint neg(const GroupSpace& g, const GroupPoint& x) { return g.neg(x); }

}  // namespace gconv
