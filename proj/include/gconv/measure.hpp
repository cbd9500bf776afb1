#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>

#include "gconv/group.hpp"

namespace gconv {

enum class WeightKind { Counting, GridVolume, Table };

/// Declared invariance properties of a measure.
struct Invariance {
  bool left = false;
  bool right = false;
  bool neg = false;
};

/// Per-point weights standing in for d mu(t).
///
/// Counting and GridVolume are translation and negation invariant; Table
/// carries arbitrary positive weights and declares no invariance.
class Measure {
 public:
  static Measure counting(const GroupSpace& g) { return Measure(g, WeightKind::Counting, 1.0, {true, true, true}); }

  static Measure grid_volume(const GroupSpace& g) {
    require(g.kind() == GroupKind::Lattice, ErrorKind::SpaceMismatch,
            "grid volume measure needs a lattice, got " + g.to_string());
    return Measure(g, WeightKind::GridVolume, std::pow(g.spacing(), static_cast<double>(g.rank())),
                   {true, true, true});
  }

  /// Explicit weights; points absent from the table get `fallback`.
  static Measure weighted(const GroupSpace& g, std::map<GroupPoint, double> table, double fallback = 1.0) {
    for (const auto& [p, w] : table) {
      g.check(p);
      require(std::isfinite(w) && w >= 0, ErrorKind::InvalidArgument,
              "measure weight at " + p.to_string() + " must be finite and nonnegative");
    }
    require(std::isfinite(fallback) && fallback >= 0, ErrorKind::InvalidArgument,
            "fallback weight must be finite and nonnegative");
    Measure m(g, WeightKind::Table, fallback, {});
    m.table_ = std::make_shared<const std::map<GroupPoint, double>>(std::move(table));
    return m;
  }

  const GroupSpace& group() const noexcept { return group_; }
  WeightKind kind() const noexcept { return kind_; }
  const Invariance& invariance() const noexcept { return flags_; }

  double weight(const GroupPoint& x) const {
    group_.check(x);
    if (table_) {
      auto it = table_->find(x);
      if (it != table_->end()) return it->second;
    }
    return uniform_;
  }

  std::string to_string() const {
    switch (kind_) {
      case WeightKind::Counting:
        return "counting";
      case WeightKind::GridVolume:
        return "grid";
      case WeightKind::Table:
        return "weighted";
    }
    return "?";
  }

 private:
  Measure(GroupSpace g, WeightKind kind, double uniform, Invariance flags)
      : group_(std::move(g)), kind_(kind), uniform_(uniform), flags_(flags) {}

  GroupSpace group_;
  WeightKind kind_;
  double uniform_;
  Invariance flags_;
  std::shared_ptr<const std::map<GroupPoint, double>> table_;
};

inline double weight(const Measure& mu, const GroupPoint& x) { return mu.weight(x); }

}  // namespace gconv
