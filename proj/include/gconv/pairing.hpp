#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gconv/error.hpp"
#include "gconv/summation.hpp"

namespace gconv {

/// Dense column-major matrix. Used for elements of L(R^d, R^rows), where
/// column j is the image of the j-th basis vector.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> column_major) : rows(r), cols(c), data(std::move(column_major)) {
    require(data.size() == r * c, ErrorKind::DimensionMismatch, "matrix data has wrong size");
  }

  double& operator()(std::size_t i, std::size_t j) { return data[j * rows + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data[j * rows + i]; }

  std::span<const double> column(std::size_t j) const { return {data.data() + j * rows, rows}; }

  std::vector<double> operator*(std::span<const double> v) const {
    require(v.size() == cols, ErrorKind::DimensionMismatch, "matrix-vector dimension mismatch");
    std::vector<double> out(rows, 0.0);
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = 0; i < rows; ++i) out[i] += (*this)(i, j) * v[j];
    return out;
  }
};

/// Continuous bilinear map L : R^dimE x R^dimE2 -> R^dimF with a declared
/// upper bound on its operator norm.
class Pairing {
 public:
  enum class Kind { Mul, ScalarSmul, Tensor3, Transpose, Lifted };

  /// (a, b) -> a*b on scalars.
  static Pairing mul() { return Pairing(std::make_shared<Node>(Node{Kind::Mul, 1, 1, 1, 1.0, {}, nullptr, 0})); }

  /// (k, v) -> k*v with v in R^m.
  static Pairing scalar_smul(std::size_t m) {
    require(m >= 1, ErrorKind::InvalidArgument, "ScalarSmul needs m >= 1");
    return Pairing(std::make_shared<Node>(Node{Kind::ScalarSmul, 1, m, m, 1.0, {}, nullptr, 0}));
  }

  /// General bilinear map out[i] = sum_jk c[(i*dimE + j)*dimE2 + k] e[j] e2[k].
  /// Without a declared bound the Frobenius norm of the coefficients is used.
  static Pairing tensor3(std::size_t dim_f, std::size_t dim_e, std::size_t dim_e2, std::vector<double> coeffs,
                         std::optional<double> norm_bound = std::nullopt) {
    require(dim_f >= 1 && dim_e >= 1 && dim_e2 >= 1, ErrorKind::InvalidArgument, "Tensor3 dimensions must be positive");
    require(coeffs.size() == dim_f * dim_e * dim_e2, ErrorKind::DimensionMismatch, "Tensor3 coefficient count mismatch");
    const double bound = norm_bound ? *norm_bound : norm2(coeffs);
    require(std::isfinite(bound) && bound >= 0, ErrorKind::InvalidArgument, "norm bound must be finite");
    return Pairing(std::make_shared<Node>(Node{Kind::Tensor3, dim_e, dim_e2, dim_f, bound, std::move(coeffs), nullptr, 0}));
  }

  std::size_t dim_e() const noexcept { return node_->dim_e; }
  std::size_t dim_e2() const noexcept { return node_->dim_e2; }
  std::size_t dim_f() const noexcept { return node_->dim_f; }
  double norm_bound() const noexcept { return node_->norm_bound; }
  Kind kind() const noexcept { return node_->kind; }

  /// L^t(y, x) = L(x, y).
  Pairing transposed() const {
    return Pairing(std::make_shared<Node>(
        Node{Kind::Transpose, dim_e2(), dim_e(), dim_f(), norm_bound(), {}, node_, 0}));
  }

  /// L^G : R^dimE x L(R^d, R^dimE2) -> L(R^d, R^dimF), (x, M) -> L(x, -) o M.
  /// Second argument and result are column-major flattened matrices.
  Pairing lifted(std::size_t d) const {
    require(d >= 1, ErrorKind::InvalidArgument, "lift dimension must be positive");
    return Pairing(std::make_shared<Node>(
        Node{Kind::Lifted, dim_e(), dim_e2() * d, dim_f() * d, norm_bound(), {}, node_, d}));
  }

  void apply(std::span<const double> e, std::span<const double> e2, std::span<double> out) const {
    if (e.size() != dim_e() || e2.size() != dim_e2() || out.size() != dim_f()) {
      fail(ErrorKind::DimensionMismatch, "pairing " + describe() + " applied to (" + std::to_string(e.size()) + ", " +
                                             std::to_string(e2.size()) + ") -> " + std::to_string(out.size()));
    }
    apply_unchecked(*node_, e, e2, out);
  }

  std::vector<double> operator()(std::span<const double> e, std::span<const double> e2) const {
    std::vector<double> out(dim_f());
    apply(e, e2, out);
    return out;
  }

  std::string describe() const { return describe(*node_); }

 private:
  struct Node {
    Kind kind;
    std::size_t dim_e, dim_e2, dim_f;
    double norm_bound;
    std::vector<double> coeffs;
    std::shared_ptr<const Node> inner;
    std::size_t lift_dim;
  };

  explicit Pairing(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static void apply_unchecked(const Node& n, std::span<const double> e, std::span<const double> e2,
                              std::span<double> out) {
    switch (n.kind) {
      case Kind::Mul:
        out[0] = e[0] * e2[0];
        return;
      case Kind::ScalarSmul:
        for (std::size_t i = 0; i < n.dim_f; ++i) out[i] = e[0] * e2[i];
        return;
      case Kind::Tensor3:
        for (std::size_t i = 0; i < n.dim_f; ++i) {
          double acc = 0;
          for (std::size_t j = 0; j < n.dim_e; ++j) {
            const double* row = n.coeffs.data() + (i * n.dim_e + j) * n.dim_e2;
            double inner = 0;
            for (std::size_t k = 0; k < n.dim_e2; ++k) inner += row[k] * e2[k];
            acc += e[j] * inner;
          }
          out[i] = acc;
        }
        return;
      case Kind::Transpose:
        apply_unchecked(*n.inner, e2, e, out);
        return;
      case Kind::Lifted: {
        const std::size_t rows_in = n.inner->dim_e2;
        const std::size_t rows_out = n.inner->dim_f;
        for (std::size_t j = 0; j < n.lift_dim; ++j) {
          apply_unchecked(*n.inner, e, e2.subspan(j * rows_in, rows_in), out.subspan(j * rows_out, rows_out));
        }
        return;
      }
    }
  }

  static std::string describe(const Node& n) {
    switch (n.kind) {
      case Kind::Mul:
        return "mul";
      case Kind::ScalarSmul:
        return "smul:" + std::to_string(n.dim_f);
      case Kind::Tensor3:
        return "tensor3(" + std::to_string(n.dim_f) + "x" + std::to_string(n.dim_e) + "x" + std::to_string(n.dim_e2) + ")";
      case Kind::Transpose:
        return "transpose(" + describe(*n.inner) + ")";
      case Kind::Lifted:
        return "lift(" + describe(*n.inner) + ", " + std::to_string(n.lift_dim) + ")";
    }
    return "?";
  }

  std::shared_ptr<const Node> node_;
};

inline std::vector<double> apply(const Pairing& L, std::span<const double> e, std::span<const double> e2) {
  return L(e, e2);
}

inline Pairing transpose(const Pairing& L) { return L.transposed(); }

inline Pairing lg_lift(const Pairing& L, std::size_t d) { return L.lifted(d); }

/// Checks L2(L1(x1, x2), x3) == L3(x1, L4(x2, x3)) on random triples in [-1, 1].
///
/// Dimension chains must match: L1: E1 x E2 -> F1, L2: F1 x E3 -> F3,
/// L3: E1 x F2 -> F3, L4: E2 x E3 -> F2.
inline bool assoc_compatible(const Pairing& L1, const Pairing& L2, const Pairing& L3, const Pairing& L4,
                             std::size_t samples, std::uint64_t seed = 0x5eed, double rel_tol = 1e-10) {
  require(L2.dim_e() == L1.dim_f() && L3.dim_e() == L1.dim_e() && L4.dim_e() == L1.dim_e2() &&
              L3.dim_e2() == L4.dim_f() && L2.dim_e2() == L4.dim_e2() && L2.dim_f() == L3.dim_f(),
          ErrorKind::DimensionMismatch,
          "pairings " + L1.describe() + ", " + L2.describe() + ", " + L3.describe() + ", " + L4.describe() +
              " do not form an associativity chain");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto draw = [&](std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = unif(rng);
    return v;
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const auto x1 = draw(L1.dim_e());
    const auto x2 = draw(L1.dim_e2());
    const auto x3 = draw(L2.dim_e2());
    const auto lhs = L2(L1(x1, x2), x3);
    const auto rhs = L3(x1, L4(x2, x3));
    double diff = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) diff = std::max(diff, std::abs(lhs[i] - rhs[i]));
    const double scale = std::max({1.0, norm_inf(lhs), norm_inf(rhs)});
    if (!(diff <= rel_tol * scale)) return false;
  }
  return true;
}

}  // namespace gconv
