#pragma once

#include <string>
#include <vector>

#include "gconv/conv.hpp"

namespace gconv {

enum class CheckStatus { Pass, Fail, Skipped, Counterexample };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::Skipped:
      return "skipped";
    case CheckStatus::Counterexample:
      return "counterexample exhibited";
  }
  return "?";
}

/// One row of a law report. `lhs` and `rhs` are the largest magnitudes of the
/// two sides; `deviation` is relative (see relative_deviation).
struct LawCheck {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  double lhs = 0;
  double rhs = 0;
  double deviation = 0;
  std::string note;

  bool failed() const noexcept { return status == CheckStatus::Fail; }
};

/// max |a - b| / max(1, max|a|, max|b|) over the union of supports.
inline double relative_deviation(const SampledFunction& a, const SampledFunction& b) {
  const double scale = std::max({1.0, max_abs_value(a), max_abs_value(b)});
  return max_abs_difference(a, b) / scale;
}

namespace detail {
inline LawCheck compare(std::string name, const SampledFunction& lhs, const SampledFunction& rhs, double tol) {
  LawCheck c;
  c.name = std::move(name);
  c.lhs = max_abs_value(lhs);
  c.rhs = max_abs_value(rhs);
  c.deviation = relative_deviation(lhs, rhs);
  c.status = c.deviation <= tol ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

inline ConvRequest with_operands(const ConvRequest& r, SampledFunction f, SampledFunction g) {
  return ConvRequest{std::move(f), std::move(g), r.pairing, r.measure, r.variant};
}
}  // namespace detail

/// (c f) * g, f * (c g) and c (f * g) agree.
inline LawCheck check_scalar_law(const ConvRequest& r, double c, double tol) {
  const auto base = scale(c, convolve(r));
  const auto left = convolve(detail::with_operands(r, scale(c, r.f), r.g));
  const auto right = convolve(detail::with_operands(r, r.f, scale(c, r.g)));
  auto a = detail::compare("scalar", left, base, tol);
  auto b = detail::compare("scalar", right, base, tol);
  if (b.deviation > a.deviation) a = b;
  return a;
}

/// f * (g + g2) = f * g + f * g2.
inline LawCheck check_additivity_right(const ConvRequest& r, const SampledFunction& g2, double tol) {
  const auto lhs = convolve(detail::with_operands(r, r.f, lin_comb(1.0, r.g, 1.0, g2)));
  const auto rhs = lin_comb(1.0, convolve(r), 1.0, convolve(detail::with_operands(r, r.f, g2)));
  return detail::compare("additivity (right)", lhs, rhs, tol);
}

/// (f + f2) * g = f * g + f2 * g.
inline LawCheck check_additivity_left(const ConvRequest& r, const SampledFunction& f2, double tol) {
  const auto lhs = convolve(detail::with_operands(r, lin_comb(1.0, r.f, 1.0, f2), r.g));
  const auto rhs = lin_comb(1.0, convolve(r), 1.0, convolve(detail::with_operands(r, f2, r.g)));
  return detail::compare("additivity (left)", lhs, rhs, tol);
}

/// f *_L g = g *_{L^t} f on abelian groups with a left- and negation-invariant
/// measure. On nonabelian groups the check is not asserted; a difference is
/// reported as an exhibited counterexample.
inline LawCheck check_commutativity(const ConvRequest& r, double tol) {
  const auto lhs = convolve(r);
  const auto rhs = convolve(ConvRequest{r.g, r.f, transpose(r.pairing), r.measure, r.variant});
  auto c = detail::compare("commutativity", lhs, rhs, tol);
  const auto& inv = r.measure.invariance();
  if (!r.group().is_abelian()) {
    c.status = c.deviation > tol ? CheckStatus::Counterexample : CheckStatus::Skipped;
    c.note = "nonabelian group; commutativity not asserted";
  } else if (!inv.left || !inv.neg) {
    c.status = CheckStatus::Skipped;
    c.note = "measure not declared left- and negation-invariant";
  }
  return c;
}

/// (f1 *_{L1,mu} f2) *_{L2,nu} f3 = f1 *_{L3,mu} (f2 *_{L4,nu} f3), nu right-invariant.
inline LawCheck check_associativity(const SampledFunction& f1, const SampledFunction& f2, const SampledFunction& f3,
                                    const Pairing& L1, const Pairing& L2, const Pairing& L3, const Pairing& L4,
                                    const Measure& mu, const Measure& nu, double tol) {
  require(nu.invariance().right, ErrorKind::Precondition, "associativity needs a right-invariant outer measure");
  const auto inner_left = convolve(ConvRequest{f1, f2, L1, mu});
  const auto lhs = convolve(ConvRequest{inner_left, f3, L2, nu});
  const auto inner_right = convolve(ConvRequest{f2, f3, L4, nu});
  const auto rhs = convolve(ConvRequest{f1, inner_right, L3, mu});
  return detail::compare("associativity", lhs, rhs, tol);
}

/// Integral identity as a law row.
inline LawCheck check_integral_identity(const ConvRequest& r, double tol) {
  LawCheck c;
  c.name = "integral identity";
  if (!r.measure.invariance().right) {
    c.note = "measure not declared right-invariant";
    return c;
  }
  const auto rep = integral_identity_check(r, tol);
  c.lhs = norm_inf(rep.lhs);
  c.rhs = norm_inf(rep.rhs);
  c.deviation = rep.deviation / (1.0 + norm2(rep.rhs));
  c.status = rep.pass ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

inline LawCheck check_fubini(const ConvRequest& r, double tol) {
  const auto rep = fubini_swap_check(r, tol);
  LawCheck c;
  c.name = "fubini swap";
  c.lhs = norm_inf(rep.x_outer);
  c.rhs = norm_inf(rep.t_outer);
  c.deviation = rep.deviation / std::max({1.0, c.lhs, c.rhs});
  c.status = rep.pass ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

}  // namespace gconv
