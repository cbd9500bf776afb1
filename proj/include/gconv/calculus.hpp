#pragma once

#include <cmath>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gconv/conv.hpp"

namespace gconv {

/// Second operand of a derivative computation: samples (derivatives by
/// central differences) or a closed form with analytic derivatives.
using SmoothOperand = std::variant<SampledFunction, SymbolicFunction>;

/// Finitely supported map from lattice points to rows x cols matrices,
/// stored as a SampledFunction of column-major flattened matrices.
class JacobianField {
 public:
  JacobianField(SampledFunction flat, std::size_t rows, std::size_t cols)
      : flat_(std::move(flat)), rows_(rows), cols_(cols) {
    require(flat_.vdim() == rows * cols, ErrorKind::DimensionMismatch, "Jacobian field has wrong flattened size");
  }

  const GroupSpace& group() const noexcept { return flat_.group(); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return flat_.size(); }
  bool empty() const noexcept { return flat_.empty(); }
  std::span<const GroupPoint> points() const noexcept { return flat_.points(); }
  const SampledFunction& flat() const noexcept { return flat_; }

  Matrix at(const GroupPoint& x) const { return Matrix(rows_, cols_, flat_.eval(x)); }

  /// x -> J(x) v.
  SampledFunction apply(std::span<const double> v) const {
    require(v.size() == cols_, ErrorKind::DimensionMismatch, "direction has wrong length");
    std::vector<GroupPoint> pts;
    std::vector<double> vals;
    for (std::size_t i = 0; i < flat_.size(); ++i) {
      const Matrix M(rows_, cols_, {flat_.value(i).begin(), flat_.value(i).end()});
      const auto Mv = M * v;
      pts.push_back(flat_.point(i));
      vals.insert(vals.end(), Mv.begin(), Mv.end());
    }
    return SampledFunction(group(), rows_, std::move(pts), std::move(vals));
  }

 private:
  SampledFunction flat_;
  std::size_t rows_;
  std::size_t cols_;
};

namespace detail {
inline void require_lattice(const GroupSpace& G, const char* what) {
  require(G.kind() == GroupKind::Lattice, ErrorKind::SpaceMismatch,
          std::string(what) + " needs a lattice group, got " + G.to_string());
}

inline const GroupSpace& operand_group(const SmoothOperand& g) {
  return std::visit(
      [](const auto& v) -> const GroupSpace& {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, SampledFunction>) {
          return v.group();
        } else {
          return v.group;
        }
      },
      g);
}

inline std::size_t operand_vdim(const SmoothOperand& g) {
  if (const auto* s = std::get_if<SampledFunction>(&g)) return s->vdim();
  return 1;
}
}  // namespace detail

/// Central-difference Jacobian of f at x; column j is (f(x+e_j) - f(x-e_j)) / 2h.
inline Matrix fd_jacobian(const SampledFunction& f, const GroupPoint& x) {
  const GroupSpace& G = f.group();
  detail::require_lattice(G, "fd_jacobian");
  G.check(x);
  const std::size_t d = G.rank(), m = f.vdim();
  Matrix J(m, d);
  const double inv = 1.0 / (2.0 * G.spacing());
  for (std::size_t j = 0; j < d; ++j) {
    const auto e = G.unit(j);
    const auto up = f.eval(G.add(x, e));
    const auto down = f.eval(G.sub(x, e));
    for (std::size_t i = 0; i < m; ++i) J(i, j) = (up[i] - down[i]) * inv;
  }
  return J;
}

/// Dg sampled on the lattice, flattened column-major (vdim = m * d).
/// Closed-form gradient for symbolic operands, central differences otherwise.
inline SampledFunction derivative_samples(const SmoothOperand& g) {
  if (const auto* s = std::get_if<SymbolicFunction>(&g)) {
    detail::require_lattice(s->group, "derivative_samples");
    return sample_gradient(*s);
  }
  const auto& f = std::get<SampledFunction>(g);
  const GroupSpace& G = f.group();
  detail::require_lattice(G, "derivative_samples");
  std::set<GroupPoint> where;
  for (const auto& p : f.points()) {
    for (std::size_t j = 0; j < G.rank(); ++j) {
      where.insert(G.add(p, G.unit(j)));
      where.insert(G.sub(p, G.unit(j)));
    }
  }
  std::vector<GroupPoint> pts(where.begin(), where.end());
  std::vector<double> vals;
  vals.reserve(pts.size() * f.vdim() * G.rank());
  for (const auto& p : pts) {
    const auto J = fd_jacobian(f, p);
    vals.insert(vals.end(), J.data.begin(), J.data.end());
  }
  return SampledFunction(G, f.vdim() * G.rank(), std::move(pts), std::move(vals));
}

/// t -> D_t g (v), with the same derivative source as derivative_samples.
inline SampledFunction directional_samples(const SmoothOperand& g, std::span<const double> v) {
  if (const auto* s = std::get_if<SymbolicFunction>(&g)) return sample_directional(*s, v);
  const auto& f = std::get<SampledFunction>(g);
  return JacobianField(derivative_samples(g), f.vdim(), f.group().rank()).apply(v);
}

namespace detail {
inline void check_derivative_inputs(const SampledFunction& f, const SmoothOperand& g, const Pairing& L,
                                    const Measure& mu) {
  require_lattice(f.group(), "convolution derivative");
  require(operand_group(g) == f.group(), ErrorKind::SpaceMismatch,
          "operands live on " + f.group().to_string() + " and " + operand_group(g).to_string());
  require(mu.group() == f.group(), ErrorKind::SpaceMismatch, "measure group mismatch");
  require(L.dim_e() == f.vdim() && L.dim_e2() == operand_vdim(g), ErrorKind::DimensionMismatch,
          "pairing " + L.describe() + " does not match operand dimensions");
}
}  // namespace detail

/// Total derivative of f *_L g as the field f *_{L^G} Dg.
inline JacobianField conv_fderiv(const SampledFunction& f, const SmoothOperand& g, const Pairing& L,
                                 const Measure& mu, Execution exec = {}) {
  detail::check_derivative_inputs(f, g, L, mu);
  const std::size_t d = f.group().rank();
  auto field = convolve(ConvRequest{f, derivative_samples(g), lg_lift(L, d), mu}, exec);
  return JacobianField(std::move(field), L.dim_f(), d);
}

/// Directional derivative x -> D_x(f *_L g)(v), computed as f *_L (t -> D_t g(v)).
inline SampledFunction conv_dderiv(const SampledFunction& f, const SmoothOperand& g, const Pairing& L,
                                   const Measure& mu, std::span<const double> v, Execution exec = {}) {
  detail::check_derivative_inputs(f, g, L, mu);
  require(v.size() == f.group().rank(), ErrorKind::DimensionMismatch, "direction has wrong length");
  return convolve(ConvRequest{f, directional_samples(g, v), L, mu}, exec);
}

/// Lattice points at least `margin` cells inside the bounding box of supp(c).
inline std::vector<GroupPoint> interior_points(const SampledFunction& c, std::int64_t margin) {
  const GroupSpace& G = c.group();
  detail::require_lattice(G, "interior_points");
  std::vector<GroupPoint> out;
  if (c.empty()) return out;
  const std::size_t d = G.rank();
  GroupPoint lo = c.point(0), hi = c.point(0);
  for (const auto& p : c.points()) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] += margin;
    hi[k] -= margin;
    if (lo[k] > hi[k]) return out;
  }
  GroupPoint p = lo;
  while (true) {
    out.push_back(p);
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (p[axis] < hi[axis]) {
        ++p[axis];
        break;
      }
      p[axis] = lo[axis];
      if (axis == 0) return out;
    }
  }
}

struct OrderDeviation {
  int order = 0;
  double max_deviation = 0;
  double tol = 0;
  std::size_t points_checked = 0;
  bool pass = false;
};

struct ContDiffReport {
  std::vector<OrderDeviation> orders;
  std::size_t margin_cells = 0;
  bool pass = false;
  std::string note;
};

/// Compares the derivative recursion (derivatives of f * g are convolutions of
/// f with derivatives of g) against central differences of f * g, up to order n.
inline ContDiffReport cont_diff_check(const SampledFunction& f, const SymbolicFunction& g, const Pairing& L,
                                      const Measure& mu, int n, double tol, Execution exec = {}) {
  require(n >= 0 && n <= 2, ErrorKind::InvalidArgument, "derivative order must be 0, 1 or 2");
  require(g.derivative_order() >= n, ErrorKind::Precondition,
          "order " + std::to_string(n) + " requested but the operand has closed-form derivatives only to order " +
              std::to_string(g.derivative_order()));
  detail::check_derivative_inputs(f, g, L, mu);

  const GroupSpace& G = f.group();
  const std::size_t d = G.rank(), m = L.dim_f();
  const double h = G.spacing();
  const auto margin = static_cast<std::int64_t>(std::ceil(g.support_radius / h)) + 2;

  const ConvRequest order0{f, sample(g), L, mu};
  const auto base = convolve(order0, exec);
  const auto pts = interior_points(base, margin);

  ContDiffReport rep;
  rep.margin_cells = static_cast<std::size_t>(margin);
  rep.note = "tolerances are discretization choices; deviations are measured on interior points only";

  auto record = [&](int order, double dev) {
    rep.orders.push_back(OrderDeviation{order, dev, tol, pts.size(), dev <= tol});
  };

  {
    double dev = 0;
    for (const auto& x : pts) {
      const auto direct = convolve_at(order0, x);
      const auto stored = base.eval(x);
      for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(direct[i] - stored[i]));
    }
    record(0, dev);
  }

  auto unit_vector = [&](std::size_t j) {
    std::vector<double> e(d, 0.0);
    e[j] = 1.0;
    return e;
  };

  if (n >= 1) {
    double dev = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const auto formula = convolve(ConvRequest{f, sample_directional(g, unit_vector(j)), L, mu}, exec);
      const auto e = G.unit(j);
      for (const auto& x : pts) {
        const auto up = base.eval(G.add(x, e)), down = base.eval(G.sub(x, e)), an = formula.eval(x);
        for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(an[i] - (up[i] - down[i]) / (2 * h)));
      }
    }
    record(1, dev);
  }

  if (n >= 2) {
    double dev = 0;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) {
        const auto formula =
            convolve(ConvRequest{f, sample_second_directional(g, unit_vector(a), unit_vector(b)), L, mu}, exec);
        const auto ea = G.unit(a), eb = G.unit(b);
        for (const auto& x : pts) {
          const auto an = formula.eval(x);
          std::vector<double> fd(m);
          if (a == b) {
            const auto up = base.eval(G.add(x, ea)), mid = base.eval(x), down = base.eval(G.sub(x, ea));
            for (std::size_t i = 0; i < m; ++i) fd[i] = (up[i] - 2 * mid[i] + down[i]) / (h * h);
          } else {
            const auto pp = base.eval(G.add(G.add(x, ea), eb)), pm = base.eval(G.sub(G.add(x, ea), eb));
            const auto mp = base.eval(G.add(G.sub(x, ea), eb)), mm = base.eval(G.sub(G.sub(x, ea), eb));
            for (std::size_t i = 0; i < m; ++i) fd[i] = (pp[i] - pm[i] - mp[i] + mm[i]) / (4 * h * h);
          }
          for (std::size_t i = 0; i < m; ++i) dev = std::max(dev, std::abs(an[i] - fd[i]));
        }
      }
    }
    record(2, dev);
  }

  rep.pass = std::all_of(rep.orders.begin(), rep.orders.end(), [](const auto& o) { return o.pass; });
  return rep;
}

}  // namespace gconv
