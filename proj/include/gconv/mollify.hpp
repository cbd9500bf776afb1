#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gconv/conv.hpp"

namespace gconv {

/// Radius, dimension and grid spacing of a normalized bump. The grid must
/// resolve the radius with at least ten cells.
struct BumpSpec {
  double radius;
  std::size_t dim;
  double grid_h;

  void validate() const {
    require(std::isfinite(radius) && radius > 0, ErrorKind::InvalidArgument, "bump radius must be positive");
    require(dim >= 1 && dim <= kMaxRank, ErrorKind::InvalidArgument, "bump dimension out of range");
    require(std::isfinite(grid_h) && grid_h > 0, ErrorKind::InvalidArgument, "grid spacing must be positive");
    if (grid_h > radius / 10.0 * (1.0 + 1e-12)) {
      fail(ErrorKind::GridTooCoarse, "bump radius " + detail::format_real(radius) + " is below 10 grid cells (h = " +
                                         detail::format_real(grid_h) + ")");
    }
  }
};

namespace detail {

// psi(u) = exp(-1 / (1 - u)) for u = |x|^2 / R^2 < 1, and its u-derivatives.
inline double bump_profile(double u) { return u < 1.0 ? std::exp(-1.0 / (1.0 - u)) : 0.0; }

inline double bump_profile_d1(double u) {
  const double p = bump_profile(u);
  if (p == 0.0) return 0.0;
  const double q = 1.0 - u;
  return -p / (q * q);
}

inline double bump_profile_d2(double u) {
  const double p = bump_profile(u);
  if (p == 0.0) return 0.0;
  const double q = 1.0 - u;
  return p * (2.0 * u - 1.0) / (q * q * q * q);
}

inline double squared_ratio(std::span<const double> x, double radius) {
  double s = 0;
  for (double v : x) s += v * v;
  return s / (radius * radius);
}

}  // namespace detail

/// Standard mollifier c * exp(-1 / (1 - |x/R|^2)) on the open R-ball, with c
/// chosen so that its grid-volume quadrature on the spec's lattice equals 1.
/// Closed-form gradient and Hessian are attached.
inline SymbolicFunction bump(const BumpSpec& spec) {
  spec.validate();
  const GroupSpace G = GroupSpace::lattice(spec.dim, spec.grid_h);
  const double R = spec.radius;

  CompensatedSum<double> mass;
  for (const auto& p : G.ball(G.zero(), R)) mass.add(detail::bump_profile(detail::squared_ratio(G.embed(p), R)));
  const double cell = std::pow(spec.grid_h, static_cast<double>(spec.dim));
  const double c = 1.0 / (cell * mass.value());

  SymbolicFunction s{G, R, {}, {}, {}};
  s.value = [c, R](std::span<const double> x) { return c * detail::bump_profile(detail::squared_ratio(x, R)); };
  s.gradient = [c, R](std::span<const double> x, std::span<double> out) {
    const double k = c * detail::bump_profile_d1(detail::squared_ratio(x, R)) * 2.0 / (R * R);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = k * x[i];
  };
  s.hessian = [c, R](std::span<const double> x, std::span<double> out) {
    const double u = detail::squared_ratio(x, R);
    const double a = c * detail::bump_profile_d2(u) * 4.0 / (R * R * R * R);
    const double b = c * detail::bump_profile_d1(u) * 2.0 / (R * R);
    const std::size_t d = x.size();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] = a * x[i] * x[j] + (i == j ? b : 0.0);
  };
  return s;
}

/// phi_R * g with scalar multiplication as the pairing (bump first).
inline SampledFunction mollify(const SampledFunction& g, const BumpSpec& spec, const Measure& mu,
                               Execution exec = {}) {
  spec.validate();
  const GroupSpace& G = g.group();
  require(G.kind() == GroupKind::Lattice && G.rank() == spec.dim, ErrorKind::SpaceMismatch,
          "mollify needs a " + std::to_string(spec.dim) + "-d lattice, got " + G.to_string());
  require(std::abs(G.spacing() - spec.grid_h) <= 1e-12 * spec.grid_h, ErrorKind::SpaceMismatch,
          "signal spacing " + detail::format_real(G.spacing()) + " differs from bump grid " +
              detail::format_real(spec.grid_h));
  require(mu.group() == G && mu.kind() == WeightKind::GridVolume, ErrorKind::SpaceMismatch,
          "mollify needs the grid-volume measure on " + G.to_string());
  return convolve(ConvRequest{sample(bump(spec)), g, Pairing::scalar_smul(g.vdim()), mu}, exec);
}

struct DistanceReport {
  std::vector<double> value;      // (f * g)(x0)
  std::vector<double> reference;  // sum_t w(t) L(f(t), g(x0))
  double distance = 0;
  double bound = 0;
  bool pass = false;
};

/// Distance between (f *_L g)(x0) and sum_t w(t) L(f(t), g(x0)), against the
/// bound eps * |L| * sum_t w(t) |f(t)|.
///
/// Preconditions (checked, the offending point is named): supp f lies in the
/// open R-ball around 0, and |g(x) - g(x0)| <= eps on every lattice point of
/// the open R-ball around x0.
inline DistanceReport conv_dist_bound(const SampledFunction& f, const SampledFunction& g, const Pairing& L,
                                      const Measure& mu, const GroupPoint& x0, double radius, double eps) {
  const ConvRequest req{f, g, L, mu};
  req.validate();
  const GroupSpace& G = f.group();
  require(G.has_metric(), ErrorKind::SpaceMismatch, "distance bound needs a metric group, got " + G.to_string());
  G.check(x0);
  require(eps >= 0, ErrorKind::InvalidArgument, "eps must be nonnegative");

  for (const auto& t : f.points()) {
    if (!(G.norm(t) < radius)) {
      fail(ErrorKind::Precondition, "supp(f) leaves the ball of radius " + detail::format_real(radius) + " at " +
                                        t.to_string());
    }
  }
  const auto g0 = g.eval(x0);
  for (const auto& x : G.ball(x0, radius)) {
    const auto gx = g.eval(x);
    std::vector<double> diff(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) diff[i] = gx[i] - g0[i];
    if (!(norm2(diff) <= eps)) {
      fail(ErrorKind::Precondition, "|g(x) - g(x0)| = " + detail::format_real(norm2(diff)) + " exceeds eps = " +
                                        detail::format_real(eps) + " at x = " + x.to_string());
    }
  }

  DistanceReport rep;
  rep.value = convolve_at(req, x0);
  const std::size_t m = L.dim_f();
  VectorAccumulator<double> ref(m), gap(m);
  std::vector<double> term(m), delta(g.vdim());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& t = f.point(i);
    const double w = mu.weight(t);
    L.apply(f.value(i), g0, term);
    ref.add(term, w);
    // By bilinearity the difference is sum_t w(t) L(f(t), g(x0 - t) - g(x0));
    // summing it directly avoids cancellation between two large sums.
    const auto gs = g.eval(G.sub(x0, t));
    for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = gs[k] - g0[k];
    L.apply(f.value(i), delta, term);
    gap.add(term, w);
  }
  rep.reference = ref.value();
  rep.distance = norm2(gap.value());
  rep.bound = eps * L.norm_bound() * norm_integral(f, mu);
  rep.pass = rep.distance <= rep.bound * (1.0 + 1e-10);
  return rep;
}

struct StudyOptions {
  /// Lipschitz constant of g for the quadrature slack; estimated from
  /// neighbouring samples when absent.
  std::optional<double> lipschitz;
  /// Final distance must not exceed this, when given.
  std::optional<double> target;
  /// Modulus of continuity eps(R); the exact sup over the sampled ball when empty.
  std::function<double(double)> modulus;
};

struct ConvergenceReport {
  std::vector<double> radii;
  std::vector<double> distances;
  std::vector<double> bounds;
  std::vector<double> moduli;
  std::vector<bool> within_bound;
  double slack = 0;
  double lipschitz = 0;
  std::optional<double> target;
  bool monotone = false;
  bool converged = false;
  bool pass = false;
};

namespace detail {
inline double sup_deviation(const SampledFunction& g, const GroupPoint& x0, double radius) {
  const auto g0 = g.eval(x0);
  double eps = 0;
  for (const auto& x : g.group().ball(x0, radius)) {
    const auto gx = g.eval(x);
    double s = 0;
    for (std::size_t i = 0; i < gx.size(); ++i) s += (gx[i] - g0[i]) * (gx[i] - g0[i]);
    eps = std::max(eps, std::sqrt(s));
  }
  return eps;
}

inline double estimate_lipschitz(const SampledFunction& g, const GroupPoint& x0, double radius) {
  const GroupSpace& G = g.group();
  double lip = 0;
  for (const auto& x : G.ball(x0, radius)) {
    const auto gx = g.eval(x);
    for (std::size_t j = 0; j < G.rank(); ++j) {
      const auto gy = g.eval(G.add(x, G.unit(j)));
      double s = 0;
      for (std::size_t i = 0; i < gx.size(); ++i) s += (gy[i] - gx[i]) * (gy[i] - gx[i]);
      lip = std::max(lip, std::sqrt(s) / G.spacing());
    }
  }
  return lip;
}
}  // namespace detail

/// (phi_R * g)(x0) against g(x0) along a strictly decreasing list of radii.
inline ConvergenceReport convergence_study(const SampledFunction& g, const GroupPoint& x0,
                                           const std::vector<double>& radii, const Measure& mu,
                                           const StudyOptions& opts = {}) {
  const GroupSpace& G = g.group();
  require(G.kind() == GroupKind::Lattice, ErrorKind::SpaceMismatch, "convergence study needs a lattice");
  require(mu.group() == G, ErrorKind::SpaceMismatch, "measure group mismatch");
  require(!radii.empty(), ErrorKind::InvalidArgument, "no radii given");
  G.check(x0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    BumpSpec{radii[i], G.rank(), G.spacing()}.validate();
    if (i > 0) require(radii[i] < radii[i - 1], ErrorKind::InvalidArgument, "radii must be strictly decreasing");
  }

  ConvergenceReport rep;
  rep.radii = radii;
  rep.target = opts.target;
  rep.lipschitz = opts.lipschitz ? *opts.lipschitz : detail::estimate_lipschitz(g, x0, radii.front() + G.spacing());
  rep.slack = 2.0 * rep.lipschitz * G.spacing() + 1e-9;

  const auto g0 = g.eval(x0);
  const auto L = Pairing::scalar_smul(g.vdim());
  for (double R : radii) {
    const auto phi = sample(bump(BumpSpec{R, G.rank(), G.spacing()}));
    const auto value = convolve_at(ConvRequest{phi, g, L, mu}, x0);
    std::vector<double> diff(value.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = value[i] - g0[i];
    const double eps = opts.modulus ? opts.modulus(R) : detail::sup_deviation(g, x0, R);
    const double bound = eps * L.norm_bound() * norm_integral(phi, mu);
    rep.distances.push_back(norm2(diff));
    rep.moduli.push_back(eps);
    rep.bounds.push_back(bound);
    rep.within_bound.push_back(rep.distances.back() <= bound + rep.slack);
  }

  rep.monotone = std::is_sorted(rep.distances.rbegin(), rep.distances.rend());
  rep.converged = !opts.target || rep.distances.back() <= *opts.target;
  rep.pass = rep.converged && std::all_of(rep.within_bound.begin(), rep.within_bound.end(), [](bool b) { return b; });
  return rep;
}

}  // namespace gconv
