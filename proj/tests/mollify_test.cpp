#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gconv/calculus.hpp"
#include "gconv/mollify.hpp"
#include "oracles.hpp"

using namespace gconv;

namespace {

using Vec = std::vector<double>;

SampledFunction sample_range(const GroupSpace& G, std::int64_t lo, std::int64_t hi, const std::function<double(double)>& u) {
  std::vector<std::pair<GroupPoint, double>> pts;
  for (std::int64_t k = lo; k <= hi; ++k) pts.push_back({GroupPoint{k}, u(static_cast<double>(k) * G.spacing())});
  return SampledFunction::scalar(G, pts);
}

// Sum of a few sines rescaled so that the Lipschitz constant is at most 1.
std::function<double(double)> random_lipschitz(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-1, 1), freq(0.5, 8), phase(0, 6.3);
  std::vector<std::array<double, 3>> terms(4);
  double lip = 0;
  for (auto& t : terms) {
    t = {amp(rng), freq(rng), phase(rng)};
    lip += std::abs(t[0] * t[1]);
  }
  return [terms, lip](double x) {
    double s = 0;
    for (const auto& t : terms) s += t[0] * std::sin(t[1] * x + t[2]);
    return s / lip;
  };
}

}  // namespace

TEST(Bump, NormalizationAndPeak) {
  const auto phi = bump(BumpSpec{1.0, 1, 0.01});
  const auto G = GroupSpace::lattice(1, 0.01);
  const auto s = sample(phi);
  EXPECT_NEAR(integral(s, Measure::grid_volume(G))[0], 1.0, 1e-12);

  const double mass = oracle::simpson(oracle::unit_bump, -1, 1, 20000);
  EXPECT_NEAR(mass, 0.44399, 1e-4);
  EXPECT_NEAR(std::exp(-1.0), 0.367879, 1e-6);
  EXPECT_NEAR(phi.value(Vec{0.0}), std::exp(-1.0) / mass, 2e-3);
  EXPECT_NEAR(phi.value(Vec{0.0}), 0.8286, 2e-3);

  for (double x : {1.0, -1.0, 1.5, 100.0}) EXPECT_EQ(phi.value(Vec{x}), 0.0);
}

TEST(Bump, SpecValidation) {
  EXPECT_NO_THROW(BumpSpec({1.0, 1, 0.1}).validate());
  try {
    BumpSpec{1.0, 1, 0.11}.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridTooCoarse);
  }
  EXPECT_THROW(BumpSpec({-1.0, 1, 0.01}).validate(), Error);
  EXPECT_THROW(BumpSpec({1.0, 0, 0.01}).validate(), Error);
}

TEST(Bump, AnalyticDerivativesMatchDifferences) {
  const auto phi = bump(BumpSpec{0.8, 2, 0.05});
  std::mt19937_64 rng(31);
  const double step = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    Vec x = oracle::random_vector(rng, 2, -0.55, 0.55);
    Vec grad(2), hess(4);
    phi.gradient(x, grad);
    phi.hessian(x, hess);
    for (std::size_t j = 0; j < 2; ++j) {
      Vec up = x, down = x;
      up[j] += step;
      down[j] -= step;
      const double fd = (phi.value(up) - phi.value(down)) / (2 * step);
      EXPECT_NEAR(grad[j], fd, 1e-6 * std::max(1.0, std::abs(fd)));
      Vec gu(2), gd(2);
      phi.gradient(up, gu);
      phi.gradient(down, gd);
      for (std::size_t i = 0; i < 2; ++i) {
        const double fd2 = (gu[i] - gd[i]) / (2 * step);
        EXPECT_NEAR(hess[i * 2 + j], fd2, 1e-5 * std::max(1.0, std::abs(fd2)));
      }
    }
  }
}

TEST(BumpProperties, NonnegativeSupportedAndNormalized) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> radius(0.2, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 2;
    const double R = radius(rng), h = R / (10 + trial);
    const auto phi = bump(BumpSpec{R, d, h});
    const auto G = GroupSpace::lattice(d, h);
    const auto s = sample(phi);
    EXPECT_NEAR(integral(s, Measure::grid_volume(G))[0], 1.0, 1e-12);
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_GE(s.value(i)[0], 0.0);
      EXPECT_LT(G.norm(s.point(i)), R);
    }
    for (int k = 0; k < 20; ++k) {
      Vec x = oracle::random_vector(rng, d, -2 * R, 2 * R);
      const double v = phi.value(x);
      EXPECT_GE(v, 0.0);
      if (norm2(x) >= R) {
        EXPECT_EQ(v, 0.0);
      }
    }
  }
}

TEST(Mollify, Examples) {
  const double h = 0.01;
  const auto G = GroupSpace::lattice(1, h);
  const auto mu = Measure::grid_volume(G);

  const auto flat = sample_range(G, -200, 200, [](double) { return 2.5; });
  const auto smooth = mollify(flat, BumpSpec{0.3, 1, h}, mu);
  for (std::int64_t k = -170; k <= 170; ++k) EXPECT_NEAR(smooth.eval(GroupPoint{k})[0], 2.5, 1e-10);

  const auto absx = sample_range(G, -100, 100, [](double x) { return std::abs(x); });
  const auto m = mollify(absx, BumpSpec{0.25, 1, h}, mu);
  EXPECT_LE(std::abs(m.eval(GroupPoint{0})[0]), 0.25 + 2 * h + 1e-9);

  const auto spike = SampledFunction::delta(G, GroupPoint{7}, 4.0);
  const auto ms = mollify(spike, BumpSpec{0.1, 1, h}, mu);
  for (const auto& p : ms.points()) EXPECT_LT(std::abs(G.distance(p, GroupPoint{7})), 0.1);

  EXPECT_THROW(mollify(absx, BumpSpec{0.25, 1, 0.02}, mu), Error);
  EXPECT_THROW(mollify(absx, BumpSpec{0.25, 1, h}, Measure::counting(G)), Error);
  EXPECT_THROW(mollify(absx, BumpSpec{0.01, 1, h}, mu), Error);
}

TEST(Mollify, MollifiedStepIsTwiceDifferentiable) {
  const double h = 0.01;
  const auto G = GroupSpace::lattice(1, h);
  const auto step = sample_range(G, 0, 100, [](double) { return 1.0; });
  const auto rep = cont_diff_check(step, bump(BumpSpec{1.0, 1, h}), Pairing::mul(), Measure::grid_volume(G), 2, 5e-2);
  EXPECT_TRUE(rep.pass);
}

TEST(ConvDistBound, Examples) {
  const double h = 0.01;
  const auto G = GroupSpace::lattice(1, h);
  const auto mu = Measure::grid_volume(G);
  const auto phi = sample(bump(BumpSpec{0.25, 1, h}));
  const auto L = Pairing::scalar_smul(1);

  const auto constant = sample_range(G, -100, 100, [](double) { return -3.0; });
  const auto zero = conv_dist_bound(phi, constant, L, mu, GroupPoint{0}, 0.25, 0.0);
  EXPECT_EQ(zero.distance, 0.0);
  EXPECT_EQ(zero.bound, 0.0);
  EXPECT_TRUE(zero.pass);

  const auto absx = sample_range(G, -100, 100, [](double x) { return std::abs(x - 0.1); });
  const auto r = conv_dist_bound(phi, absx, L, mu, GroupPoint{10}, 0.25, 0.25);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.bound, 0.25, 1e-12);
  EXPECT_NEAR(r.distance, std::abs(r.value[0] - r.reference[0]), 1e-12);

  try {
    conv_dist_bound(phi, absx, L, mu, GroupPoint{10}, 0.25, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
    EXPECT_NE(std::string(e.what()).find("at x ="), std::string::npos);
  }
  try {
    conv_dist_bound(phi, absx, L, mu, GroupPoint{10}, 0.2, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
    EXPECT_NE(std::string(e.what()).find("supp(f)"), std::string::npos);
  }
}

TEST(ConvDistBound, RandomizedLipschitzSignals) {
  std::mt19937_64 rng(33);
  const double h = 0.01;
  const auto G = GroupSpace::lattice(1, h);
  const auto mu = Measure::grid_volume(G);
  std::uniform_real_distribution<double> val(-1, 1);
  std::uniform_int_distribution<std::int64_t> centre(-50, 50);
  for (int trial = 0; trial < 30; ++trial) {
    const double R = 0.1 + 0.01 * trial;
    const auto cells = static_cast<std::int64_t>(std::ceil(R / h - 1e-9)) - 1;
    std::vector<std::pair<GroupPoint, double>> fp;
    for (std::int64_t k = -cells; k <= cells; ++k) fp.push_back({GroupPoint{k}, val(rng)});
    const auto f = SampledFunction::scalar(G, fp);
    const auto u = random_lipschitz(rng);
    const auto g = sample_range(G, -200, 200, u);
    const GroupPoint x0{centre(rng)};
    const auto rep = conv_dist_bound(f, g, Pairing::scalar_smul(1), mu, x0, R, R);
    EXPECT_TRUE(rep.pass) << rep.distance << " > " << rep.bound;
    // bound uses the integral of |f|, which dominates |integral of f|
    EXPECT_GE(rep.bound, R * std::abs(integral(f, mu)[0]) - 1e-15);
  }
}

TEST(ConvergenceStudy, Examples) {
  const double h = 0.005;
  const auto G = GroupSpace::lattice(1, h);
  const auto mu = Measure::grid_volume(G);
  const Vec radii{0.5, 0.25, 0.125, 0.0625};

  const auto constant = sample_range(G, -200, 200, [](double) { return 4.0; });
  const auto rc = convergence_study(constant, GroupPoint{0}, radii, mu);
  for (double d : rc.distances) EXPECT_EQ(d, 0.0);
  EXPECT_TRUE(rc.pass);

  const auto absx = sample_range(G, -200, 200, [](double x) { return std::abs(x); });
  StudyOptions opts;
  opts.target = 0.07;
  const auto r = convergence_study(absx, GroupPoint{0}, radii, mu, opts);
  ASSERT_EQ(r.distances.size(), radii.size());
  EXPECT_NEAR(r.lipschitz, 1.0, 1e-9);
  for (std::size_t i = 0; i < radii.size(); ++i) EXPECT_LE(r.distances[i], radii[i] + r.slack);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.pass);

  const auto sine = sample_range(G, -200, 400, [](double x) { return std::sin(x); });
  const GroupPoint near{static_cast<std::int64_t>(std::llround(std::numbers::pi / 4 / h))};
  const auto rs = convergence_study(sine, near, radii, mu, opts);
  EXPECT_LE(rs.distances.back(), 0.07);
  EXPECT_TRUE(rs.pass);

  EXPECT_THROW(convergence_study(absx, GroupPoint{0}, {0.25, 0.5}, mu), Error);
  try {
    convergence_study(absx, GroupPoint{0}, {0.5, 0.01}, mu);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridTooCoarse);
  }
}
