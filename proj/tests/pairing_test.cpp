#include <gtest/gtest.h>

#include <random>

#include "gconv/pairing.hpp"
#include "oracles.hpp"

using namespace gconv;

namespace {

using Vec = std::vector<double>;

Pairing random_tensor(std::mt19937_64& rng, std::size_t f, std::size_t e, std::size_t e2) {
  return Pairing::tensor3(f, e, e2, oracle::random_vector(rng, f * e * e2, -2, 2));
}

// Evaluates a Tensor3 coefficient array directly.
Vec tensor_oracle(const Vec& c, std::size_t f, std::size_t e, std::size_t e2, const Vec& x, const Vec& y) {
  Vec out(f, 0.0);
  for (std::size_t i = 0; i < f; ++i)
    for (std::size_t j = 0; j < e; ++j)
      for (std::size_t k = 0; k < e2; ++k) out[i] += c[(i * e + j) * e2 + k] * x[j] * y[k];
  return out;
}

void expect_close(const Vec& a, const Vec& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol * std::max(1.0, std::abs(b[i])));
}

std::vector<Pairing> pairing_zoo(std::mt19937_64& rng) {
  return {Pairing::mul(),
          Pairing::scalar_smul(1),
          Pairing::scalar_smul(3),
          random_tensor(rng, 2, 3, 4),
          random_tensor(rng, 1, 1, 1),
          transpose(Pairing::scalar_smul(2)),
          transpose(random_tensor(rng, 3, 2, 2)),
          lg_lift(Pairing::scalar_smul(2), 3),
          lg_lift(random_tensor(rng, 2, 2, 3), 2),
          transpose(lg_lift(Pairing::mul(), 2))};
}

}  // namespace

TEST(Pairing, ApplyExamples) {
  EXPECT_EQ(apply(Pairing::scalar_smul(2), Vec{3}, Vec{1, -1}), (Vec{3, -3}));
  EXPECT_EQ(apply(Pairing::mul(), Vec{2}, Vec{5}), Vec{10});
  // column j of the result is 2 * M[:, j]
  EXPECT_EQ(apply(lg_lift(Pairing::scalar_smul(1), 2), Vec{2}, Vec{1, 3}), (Vec{2, 6}));
  EXPECT_THROW(apply(Pairing::mul(), Vec{1, 2}, Vec{1}), Error);
}

TEST(Pairing, TransposeExamples) {
  EXPECT_EQ(apply(transpose(Pairing::mul()), Vec{2}, Vec{5}), Vec{10});
  EXPECT_EQ(apply(transpose(Pairing::scalar_smul(2)), Vec{1, -1}, Vec{3}), (Vec{3, -3}));

  std::mt19937_64 rng(1);
  const std::size_t f = 2, e = 3, e2 = 4;
  const Vec c = oracle::random_vector(rng, f * e * e2, -2, 2);
  const auto L = Pairing::tensor3(f, e, e2, c);
  const auto Lt = transpose(L);
  EXPECT_EQ(Lt.dim_e(), e2);
  EXPECT_EQ(Lt.dim_e2(), e);
  EXPECT_EQ(Lt.norm_bound(), L.norm_bound());
  for (int i = 0; i < 20; ++i) {
    const Vec x = oracle::random_vector(rng, e), y = oracle::random_vector(rng, e2);
    expect_close(apply(Lt, y, x), tensor_oracle(c, f, e, e2, x, y), 1e-14);
  }
}

TEST(Pairing, LiftShapesAndColumns) {
  const auto one = lg_lift(Pairing::scalar_smul(1), 1);
  EXPECT_EQ(apply(one, Vec{4}, Vec{2.5}), Vec{10});

  const auto L = lg_lift(Pairing::scalar_smul(2), 3);
  EXPECT_EQ(L.dim_e(), 1u);
  EXPECT_EQ(L.dim_e2(), 6u);
  EXPECT_EQ(L.dim_f(), 6u);

  std::mt19937_64 rng(2);
  const std::size_t d = 3;
  const auto inner = random_tensor(rng, 2, 2, 3);
  const auto lifted = lg_lift(inner, d);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = oracle::random_vector(rng, 2);
    const Matrix M(3, d, oracle::random_vector(rng, 3 * d));
    const Vec out = apply(lifted, x, M.data);
    for (std::size_t j = 0; j < d; ++j) {
      const Vec col = apply(inner, x, M.column(j));
      expect_close(Vec(out.begin() + j * 2, out.begin() + (j + 1) * 2), col, 1e-15);
    }
  }
}

TEST(Pairing, AssocCompatibleExamples) {
  const auto mul = Pairing::mul();
  EXPECT_TRUE(assoc_compatible(mul, mul, mul, mul, 50));
  const auto s1 = Pairing::scalar_smul(1);
  EXPECT_TRUE(assoc_compatible(mul, mul, s1, s1, 50));
  const auto twice = Pairing::tensor3(1, 1, 1, {2.0});
  EXPECT_FALSE(assoc_compatible(mul, mul, mul, twice, 50));
  // L2(L1(1,1),1) = 1 but L3(1, L4(1,1)) = 2
  EXPECT_EQ(apply(mul, apply(mul, Vec{1}, Vec{1}), Vec{1}), Vec{1});
  EXPECT_EQ(apply(mul, Vec{1}, apply(twice, Vec{1}, Vec{1})), Vec{2});
  EXPECT_THROW(assoc_compatible(mul, Pairing::scalar_smul(2), mul, mul, 1), Error);
}

TEST(PairingProperties, Bilinearity) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coef(-3, 3);
  for (const auto& L : pairing_zoo(rng)) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec x = oracle::random_vector(rng, L.dim_e()), x2 = oracle::random_vector(rng, L.dim_e());
      const Vec y = oracle::random_vector(rng, L.dim_e2()), y2 = oracle::random_vector(rng, L.dim_e2());
      const double a = coef(rng), b = coef(rng);
      Vec ax(x.size()), ay(y.size());
      for (std::size_t i = 0; i < x.size(); ++i) ax[i] = a * x[i] + b * x2[i];
      for (std::size_t i = 0; i < y.size(); ++i) ay[i] = a * y[i] + b * y2[i];
      const Vec l1 = apply(L, ax, y), l2 = apply(L, x, ay);
      const Vec p = apply(L, x, y), q = apply(L, x2, y), r = apply(L, x, y2);
      Vec r1(p.size()), r2(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        r1[i] = a * p[i] + b * q[i];
        r2[i] = a * p[i] + b * r[i];
      }
      expect_close(l1, r1, 1e-12);
      expect_close(l2, r2, 1e-12);
    }
  }
}

TEST(PairingProperties, NormBoundHolds) {
  std::mt19937_64 rng(5);
  for (const auto& L : pairing_zoo(rng)) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec x = oracle::random_vector(rng, L.dim_e(), -5, 5), y = oracle::random_vector(rng, L.dim_e2(), -5, 5);
      EXPECT_LE(norm2(apply(L, x, y)), L.norm_bound() * norm2(x) * norm2(y) * (1 + 1e-12)) << L.describe();
    }
  }
}

TEST(PairingProperties, TransposeIsInvolution) {
  std::mt19937_64 rng(6);
  for (const auto& L : pairing_zoo(rng)) {
    const auto back = transpose(transpose(L));
    EXPECT_EQ(back.dim_e(), L.dim_e());
    EXPECT_EQ(back.dim_e2(), L.dim_e2());
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x = oracle::random_vector(rng, L.dim_e()), y = oracle::random_vector(rng, L.dim_e2());
      EXPECT_EQ(apply(back, x, y), apply(L, x, y));
    }
  }
}

TEST(PairingProperties, LiftComposesWithLinearMap) {
  std::mt19937_64 rng(8);
  for (std::size_t d = 1; d <= 4; ++d) {
    const auto inner = random_tensor(rng, 3, 2, 2);
    const auto lifted = lg_lift(inner, d);
    EXPECT_EQ(lifted.norm_bound(), inner.norm_bound());
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x = oracle::random_vector(rng, 2);
      const Matrix M(2, d, oracle::random_vector(rng, 2 * d));
      const Vec v = oracle::random_vector(rng, d);
      const Matrix out(3, d, apply(lifted, x, M.data));
      expect_close(out * v, apply(inner, x, M * v), 1e-13);
    }
  }
}
