#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <thread>
#include <unordered_set>
#include <vector>

#include "gconv/function.hpp"
#include "gconv/measure.hpp"
#include "gconv/pairing.hpp"
#include "gconv/summation.hpp"

namespace gconv {

/// Which integrand to use.
///   Standard:      sum_t w(t) L(f(t), g(x - t))
///   NonabelianAlt: sum_t w(t) L(f(-t + x), g(t))
enum class Variant { Standard, NonabelianAlt };

struct ConvRequest {
  SampledFunction f;
  SampledFunction g;
  Pairing pairing;
  Measure measure;
  Variant variant = Variant::Standard;

  const GroupSpace& group() const noexcept { return f.group(); }

  void validate() const {
    require(f.group() == g.group(), ErrorKind::SpaceMismatch,
            "operands live on different groups: " + f.group().to_string() + " vs " + g.group().to_string());
    require(measure.group() == f.group(), ErrorKind::SpaceMismatch,
            "measure lives on " + measure.group().to_string() + ", operands on " + f.group().to_string());
    require(f.vdim() == pairing.dim_e(), ErrorKind::DimensionMismatch,
            "f has vdim " + std::to_string(f.vdim()) + " but " + pairing.describe() + " expects " +
                std::to_string(pairing.dim_e()));
    require(g.vdim() == pairing.dim_e2(), ErrorKind::DimensionMismatch,
            "g has vdim " + std::to_string(g.vdim()) + " but " + pairing.describe() + " expects " +
                std::to_string(pairing.dim_e2()));
  }
};

/// Worker count for data-parallel evaluation. Results do not depend on it.
struct Execution {
  unsigned threads = 1;
};

namespace detail {

/// Visits each nonvanishing summand of the convolution at x in the fixed
/// (lexicographic) order: fn(t, f_value, g_value).
template <class Fn>
void for_each_summand(const ConvRequest& r, const GroupPoint& x, Fn&& fn) {
  const GroupSpace& G = r.group();
  if (r.variant == Variant::Standard) {
    for (std::size_t i = 0; i < r.f.size(); ++i) {
      const GroupPoint& t = r.f.point(i);
      if (auto gv = r.g.lookup(G.sub(x, t))) fn(t, r.f.value(i), *gv);
    }
  } else {
    for (std::size_t j = 0; j < r.g.size(); ++j) {
      const GroupPoint& t = r.g.point(j);
      if (auto fv = r.f.lookup(G.add(G.neg(t), x))) fn(t, *fv, r.g.value(j));
    }
  }
}

inline void convolve_into(const ConvRequest& r, const GroupPoint& x, std::span<double> out,
                          std::vector<double>& scratch) {
  VectorAccumulator<double> acc(r.pairing.dim_f());
  scratch.resize(r.pairing.dim_f());
  for_each_summand(r, x, [&](const GroupPoint& t, std::span<const double> fv, std::span<const double> gv) {
    r.pairing.apply(fv, gv, scratch);
    acc.add(scratch, r.measure.weight(t));
  });
  acc.write(out);
}

}  // namespace detail

/// Candidate output points {s + t : s in supp g, t in supp f}, sorted.
/// Contains the support of the convolution for both variants.
inline std::vector<GroupPoint> support_sum(const ConvRequest& r) {
  std::unordered_set<GroupPoint, GroupPointHash> seen;
  seen.reserve(r.f.size() + r.g.size());
  for (const auto& s : r.g.points())
    for (const auto& t : r.f.points()) seen.insert(r.group().add(s, t));
  std::vector<GroupPoint> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<double> convolve_at(const ConvRequest& r, const GroupPoint& x) {
  r.validate();
  r.group().check(x);
  std::vector<double> out(r.pairing.dim_f());
  std::vector<double> scratch;
  detail::convolve_into(r, x, out, scratch);
  return out;
}

/// Full convolution, evaluated on the support sum; zero results are pruned.
inline SampledFunction convolve(const ConvRequest& r, Execution exec = {}) {
  r.validate();
  const std::size_t m = r.pairing.dim_f();
  std::vector<GroupPoint> pts = support_sum(r);
  std::vector<double> vals(pts.size() * m);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> scratch;
    for (std::size_t i = begin; i < end; ++i) {
      detail::convolve_into(r, pts[i], std::span<double>(vals.data() + i * m, m), scratch);
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(exec.threads, pts.size()));
  if (threads == 1) {
    work(0, pts.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (pts.size() + threads - 1) / threads;
    for (std::size_t k = 0; k < threads; ++k) {
      const std::size_t b = k * chunk, e = std::min(pts.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  return SampledFunction(r.group(), m, std::move(pts), std::move(vals));
}

/// True iff every summand at x is finite.
inline bool exists_at(const ConvRequest& r, const GroupPoint& x) {
  r.validate();
  r.group().check(x);
  bool finite = true;
  std::vector<double> scratch(r.pairing.dim_f());
  auto all_finite = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
  };
  detail::for_each_summand(r, x, [&](const GroupPoint& t, std::span<const double> fv, std::span<const double> gv) {
    if (!finite) return;
    const double w = r.measure.weight(t);
    r.pairing.apply(fv, gv, scratch);
    for (double& s : scratch) s *= w;
    finite = std::isfinite(w) && all_finite(fv) && all_finite(gv) && all_finite(scratch);
  });
  return finite;
}

struct IdentityReport {
  std::vector<double> lhs;
  std::vector<double> rhs;
  double deviation = 0;
  bool pass = false;
};

/// Compares integral(f * g) with L(integral f, integral g).
/// Requires a right-invariant measure.
inline IdentityReport integral_identity_check(const ConvRequest& r, double tol) {
  r.validate();
  require(r.measure.invariance().right, ErrorKind::Precondition,
          "integral identity needs a right-invariant measure; " + r.measure.to_string() + " does not declare one");
  IdentityReport rep;
  rep.lhs = integral(convolve(r), r.measure);
  rep.rhs = r.pairing(integral(r.f, r.measure), integral(r.g, r.measure));
  std::vector<double> diff(rep.lhs.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = rep.lhs[i] - rep.rhs[i];
  rep.deviation = norm2(diff);
  rep.pass = rep.deviation <= tol * (1.0 + norm2(rep.rhs));
  return rep;
}

struct FubiniReport {
  std::vector<double> x_outer;  // sum_x w(x) sum_t w(t) ...
  std::vector<double> t_outer;  // sum_t w(t) sum_x w(x) ...
  double deviation = 0;
  bool pass = false;
};

/// Evaluates the double sum of w(x) w(t) L(f(t), g(x - t)) in both orders.
inline FubiniReport fubini_swap_check(const ConvRequest& r, double rel_tol = 1e-12) {
  r.validate();
  const GroupSpace& G = r.group();
  const std::size_t m = r.pairing.dim_f();
  std::vector<double> inner(m), scratch(m);

  VectorAccumulator<double> x_outer(m);
  for (const auto& x : support_sum(r)) {
    detail::convolve_into(r, x, inner, scratch);
    x_outer.add(inner, r.measure.weight(x));
  }

  // For fixed t the x with a nonzero summand are exactly s + t (s in supp g)
  // in the standard variant and t + u (u in supp f) in the other.
  VectorAccumulator<double> t_outer(m);
  const bool standard = r.variant == Variant::Standard;
  const SampledFunction& outer_fn = standard ? r.f : r.g;
  const SampledFunction& inner_fn = standard ? r.g : r.f;
  for (std::size_t i = 0; i < outer_fn.size(); ++i) {
    const GroupPoint& t = outer_fn.point(i);
    VectorAccumulator<double> acc(m);
    for (std::size_t j = 0; j < inner_fn.size(); ++j) {
      const GroupPoint& s = inner_fn.point(j);
      const GroupPoint x = standard ? G.add(s, t) : G.add(t, s);
      if (standard) {
        r.pairing.apply(outer_fn.value(i), inner_fn.value(j), scratch);
      } else {
        r.pairing.apply(inner_fn.value(j), outer_fn.value(i), scratch);
      }
      acc.add(scratch, r.measure.weight(x));
    }
    acc.write(inner);
    t_outer.add(inner, r.measure.weight(t));
  }

  FubiniReport rep;
  rep.x_outer = x_outer.value();
  rep.t_outer = t_outer.value();
  double diff = 0;
  for (std::size_t k = 0; k < m; ++k) diff = std::max(diff, std::abs(rep.x_outer[k] - rep.t_outer[k]));
  rep.deviation = diff;
  rep.pass = diff <= rel_tol * std::max({1.0, norm_inf(rep.x_outer), norm_inf(rep.t_outer)});
  return rep;
}

}  // namespace gconv
