#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "maxreg/generators.hpp"
#include "maxreg/maxops.hpp"

using namespace maxreg;

namespace {

Domain unit_square() { return Domain::rectangle({0, 0, 0}, {1, 1, 0}, 2); }

ScalarField random_field(const LatticePtr& lat, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(lat->size());
  for (auto& x : v) x = u(rng);
  return ScalarField(lat, std::move(v));
}

ScalarField constant(const LatticePtr& lat, double c) {
  return ScalarField::from_function(lat, [c](const Coord&) { return c; });
}

// Unit square with 31 x 31 inside points.
LatticePtr grid32() { return rasterize(unit_square(), 1.0 / 32); }

} // namespace

TEST(LocalMaximal, ConstantOnesAlphaZero) {
  const auto lat = rasterize(Domain::disk({0, 0, 0}, 1.0, 2), 1.0 / 32);
  const auto one = constant(lat, 1.0);
  for (std::size_t m : {1, 2, 3}) {
    const auto res = local_maximal_field(MultiField(std::vector<ScalarField>(m, one)), 0.0);
    for (std::size_t p : lat->inside_points()) EXPECT_EQ(res.value[p], 1.0);
  }
}

TEST(LocalMaximal, ConstantOneAlphaOneIsLargestRadius) {
  const auto lat = rasterize(Domain::disk({0, 0, 0}, 1.0, 2), 1.0 / 32);
  const auto res = local_maximal_field(MultiField({constant(lat, 1.0)}), 1.0);
  for (std::size_t p : lat->inside_points()) {
    const auto ladder = radius_ladder(lat->delta(p), lat->h());
    EXPECT_EQ(res.value[p], ladder.empty() ? 0.0 : ladder.back());
    EXPECT_LE(std::abs(res.value[p] - lat->delta(p)), lat->h());
  }
}

TEST(LocalMaximal, OracleAndFastEnginesAgreeBitwise) {
  const auto lat = grid32();
  const auto f1 = random_field(lat, 11), f2 = random_field(lat, 12);
  for (double alpha : {0.0, 1.0, 1.5}) {
    const MultiField mf({f1, f2});
    MaxOptions o;
    o.rel_tol = 0.0;
    o.engine = Engine::oracle;
    const auto a = local_maximal_field(mf, alpha, o);
    o.engine = Engine::fast;
    const auto b = local_maximal_field(mf, alpha, o);
    for (std::size_t p : lat->inside_points()) {
      EXPECT_EQ(a.value[p], b.value[p]) << "alpha=" << alpha;
      EXPECT_EQ(a.argmax_radii[p], b.argmax_radii[p]);
    }
  }
}

TEST(LocalMaximal, EnginesAgreeWithEdgeRadiusOnTheDisk) {
  const auto lat = rasterize(Domain::disk({0, 0, 0}, 1.0, 2), 1.0 / 24);
  const auto f1 = random_field(lat, 21), f2 = random_field(lat, 22);
  MaxOptions o;
  o.rule = RadiusRule::ladder_with_edge;
  o.engine = Engine::oracle;
  const auto a = local_maximal_field(MultiField({f1, f2}), 1.0, o);
  o.engine = Engine::fast;
  const auto b = local_maximal_field(MultiField({f1, f2}), 1.0, o);
  for (std::size_t p : lat->inside_points()) EXPECT_EQ(a.value[p], b.value[p]);
}

TEST(LocalMaximal, MatchesProfileMaximum) {
  const auto lat = grid32();
  const MultiField mf({random_field(lat, 31), random_field(lat, 32, -1.0, 1.0)});
  const auto res = local_maximal_field(mf, 1.5);
  for (std::size_t p : lat->inside_points()) {
    const auto prof = radial_profile(mf, p, 1.5);
    EXPECT_EQ(res.value[p], prof.max_value());
    ASSERT_FALSE(res.argmax_radii[p].empty());
    for (double r : res.argmax_radii[p]) {
      double u = prof.value_at_zero;
      for (std::size_t j = 0; j < prof.radii.size(); ++j)
        if (prof.radii[j] == r) u = prof.values[j];
      EXPECT_GE(u, (1.0 - res.rel_tol) * res.value[p]);
    }
  }
}

TEST(LocalMaximal, SlotsAreTakenInAbsoluteValue) {
  const auto lat = grid32();
  const auto f = random_field(lat, 41, -1.0, 1.0);
  const auto a = local_maximal_field(MultiField({f}), 0.0);
  const auto b = local_maximal_field(MultiField({f.map([](double v) { return std::abs(v); })}), 0.0);
  for (std::size_t p : lat->inside_points()) EXPECT_EQ(a.value[p], b.value[p]);
}

TEST(LocalMaximal, Errors) {
  const auto lat = grid32();
  const MultiField mf({constant(lat, 1.0), constant(lat, 1.0)});
  EXPECT_THROW(local_maximal_field(mf, 4.0), argument_error);
  EXPECT_THROW(local_maximal_field(mf, -0.5), argument_error);
  EXPECT_THROW(local_maximal_field(mf, 0.0, Engine::fast, 0.2), argument_error);
  EXPECT_THROW(MultiField(std::vector<ScalarField>{}), argument_error);
}

TEST(SphericalMaximal, ConstantOneAlphaZero) {
  const auto lat = rasterize(Domain::disk({0, 0, 0}, 1.0, 2), 1.0 / 32);
  const auto s = spherical_maximal_field(constant(lat, 1.0), 0.0);
  for (std::size_t p : lat->inside_points()) {
    if (lat->delta(p) > 2 * lat->h())
      EXPECT_EQ(s[p], 1.0);
    else
      EXPECT_EQ(s[p], 0.0);
  }
}

TEST(SphericalMaximal, ConstantOneAlphaOneIsLargestShell) {
  const auto lat = rasterize(Domain::disk({0, 0, 0}, 1.0, 2), 1.0 / 32);
  const auto s = spherical_maximal_field(constant(lat, 1.0), 1.0);
  for (std::size_t p : lat->inside_points()) {
    if (lat->delta(p) <= 2 * lat->h()) continue;
    const auto ladder = radius_ladder(lat->delta(p), lat->h());
    EXPECT_EQ(s[p], ladder.back());
    EXPECT_LE(std::abs(s[p] - lat->delta(p)), lat->h());
  }
}

TEST(SphericalMaximal, MatchesDirectShellEnumeration) {
  const auto lat = grid32();
  const auto f = random_field(lat, 51);
  const auto s = spherical_maximal_field(f, 0.5);
  const Averager av(f);
  for (std::size_t p : lat->inside_points()) {
    double best = 0.0;
    for (double r : radius_ladder(lat->delta(p), lat->h()))
      if (r >= 2 * lat->h() * (1 - 1e-9)) best = std::max(best, std::pow(r, 0.5) * av.sphere_average(p, r));
    EXPECT_EQ(s[p], best);
  }
}

TEST(SphericalMaximal, GaussianAgainstBallMaximum) {
  const double h = 1.0 / 64;
  const auto lat = rasterize(unit_square(), h);
  GeneratorSpec g;
  g.kind = "gaussian";
  g.center = {0.5, 0.5};
  g.width = 0.1;
  const auto f = generate_field(g, lat);
  const auto s = spherical_maximal_field(f, 0.0);
  const auto m = local_maximal_field(MultiField({f}), 0.0);
  double worst = 0.0;
  for (std::size_t p : lat->inside_points()) {
    if (lat->delta(p) <= 8 * h) continue;
    EXPECT_LE(s[p], f.max_abs());
    worst = std::max(worst, s[p] / m.value[p]);
  }
  std::cout << "max sphere/ball maximal ratio at delta > 8h: " << worst << '\n';
  // At the peak the shells are radially decreasing averages below the point value.
  std::size_t centre = 0;
  for (std::size_t p : lat->inside_points())
    if (f[p] > f[centre]) centre = p;
  EXPECT_LE(s[centre], m.value[centre]);
}

TEST(SphericalMaximal, Errors) {
  const auto lat = grid32();
  EXPECT_THROW(spherical_maximal_field(constant(lat, 1.0), 2.0), argument_error);
  EXPECT_THROW(spherical_maximal_field(constant(lat, 1.0), -1.0), argument_error);
}

TEST(ArgmaxRadii, IncreasingProfileHasSingleTop) {
  const auto lat = grid32();
  const std::size_t p = lat->inside_points()[lat->inside_count() / 2];
  const auto prof = radial_profile(MultiField({constant(lat, 1.0)}), p, 1.0);
  const auto set = argmax_radii(prof, 0.0);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set.front(), prof.radii.back());
}

TEST(ArgmaxRadii, ConstantProfileIsTotalTie) {
  const auto lat = grid32();
  const std::size_t p = lat->inside_points()[lat->inside_count() / 2];
  const auto prof = radial_profile(MultiField({constant(lat, 1.0)}), p, 0.0);
  const auto set = argmax_radii(prof, 0.0);
  ASSERT_EQ(set.size(), prof.radii.size() + 1);
  EXPECT_EQ(set.front(), 0.0);
  for (std::size_t j = 0; j < prof.radii.size(); ++j) EXPECT_EQ(set[j + 1], prof.radii[j]);
}

TEST(ArgmaxRadii, TwoEqualMaximaAreBothReturned) {
  // On [0,1] with h = 1/100 and x = 1/2: mass 1 at offsets +-3 and 2 at +-10 gives
  // ball averages 2/7 at r = 3h and 6/21 at r = 10h, and smaller values elsewhere.
  const double h = 0.01;
  const auto lat = rasterize(Domain::interval(0.0, 1.0), h);
  const auto f = ScalarField::from_function(lat, [&](const Coord& y) {
    const auto k = std::llabs(std::llround(y[0] / h) - 50);
    return k == 3 ? 1.0 : k == 10 ? 2.0 : 0.0;
  });
  std::size_t x = 0;
  for (std::size_t p : lat->inside_points())
    if (std::llround(lat->grid().point(p)[0] / h) == 50) x = p;
  const auto prof = radial_profile(MultiField({f}), x, 0.0);
  double best = prof.value_at_zero;
  std::vector<double> expect;
  for (double v : prof.values) best = std::max(best, v);
  for (std::size_t j = 0; j < prof.values.size(); ++j)
    if (prof.values[j] == best) expect.push_back(prof.radii[j]);
  ASSERT_EQ(expect.size(), 2u);
  EXPECT_NEAR(expect[0], 0.03, 1e-15);
  EXPECT_NEAR(expect[1], 0.10, 1e-15);
  EXPECT_EQ(argmax_radii(prof, 0.0), expect);
  MaxOptions o;
  o.rel_tol = 0.0;
  EXPECT_EQ(local_maximal_field(MultiField({f}), 0.0, o).argmax_radii[x], expect);
}

TEST(ArgmaxRadii, ToleranceBandWidensTheSet) {
  const auto lat = grid32();
  const std::size_t p = lat->inside_points()[lat->inside_count() / 2];
  const auto prof = radial_profile(MultiField({constant(lat, 1.0)}), p, 1.0);
  const auto set = argmax_radii(prof, 0.1);
  for (double r : set) EXPECT_GE(r, 0.9 * prof.radii.back());
  EXPECT_GE(set.size(), 2u);
  EXPECT_THROW(argmax_radii(prof, -1.0), argument_error);
}

TEST(Hausdorff, Examples) {
  const std::vector<double> a{0.1}, b{0.0}, c{0.3}, d{0.1, 0.4}, e{0.2};
  EXPECT_EQ(hausdorff_distance(a, a), 0.0);
  EXPECT_NEAR(hausdorff_distance(b, c), 0.3, 1e-15);
  EXPECT_NEAR(hausdorff_distance(d, e), 0.2, 1e-15);
  EXPECT_NEAR(hausdorff_distance(e, d), 0.2, 1e-15);
}

TEST(Hausdorff, EmptySetIsRejected) {
  const std::vector<double> a{0.1}, none;
  EXPECT_THROW(hausdorff_distance(a, none), argument_error);
  EXPECT_THROW(hausdorff_distance(none, a), argument_error);
}

TEST(Hausdorff, AgreesWithBruteForce) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(1 + rng() % 6), b(1 + rng() % 6);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    auto directed = [](const std::vector<double>& s, const std::vector<double>& r) {
      double w = 0.0;
      for (double x : s) {
        double d = 1e300;
        for (double y : r) d = std::min(d, std::abs(x - y));
        w = std::max(w, d);
      }
      return w;
    };
    EXPECT_EQ(hausdorff_distance(a, b), std::max(directed(a, b), directed(b, a)));
  }
}

TEST(MaximalProperties, DominatesPointProductAtAlphaZero) {
  const auto lat = grid32();
  const auto f1 = random_field(lat, 61, -2.0, 2.0), f2 = random_field(lat, 62);
  const auto res = local_maximal_field(MultiField({f1, f2}), 0.0);
  for (std::size_t p : lat->inside_points()) EXPECT_GE(res.value[p], std::abs(f1[p] * f2[p]));
}

TEST(MaximalProperties, AlphaStepBoundIsExact) {
  const auto lat = rasterize(Domain::disk({0, 0, 0}, 1.0, 2), 1.0 / 32);
  const MultiField mf({random_field(lat, 71), random_field(lat, 72)});
  for (double alpha : {1.0, 1.5, 2.5}) {
    const auto hi = local_maximal_field(mf, alpha);
    const auto lo = local_maximal_field(mf, alpha - 1.0);
    for (std::size_t p : lat->inside_points()) EXPECT_LE(hi.value[p], lat->delta(p) * lo.value[p]);
  }
}

TEST(MaximalProperties, CompactSupportVanishesNearTheBoundary) {
  const auto lat = rasterize(unit_square(), 1.0 / 64);
  GeneratorSpec g;
  g.kind = "bump";
  g.center = {0.5, 0.5};
  g.width = 0.3;
  const auto bump = generate_field(g, lat);
  const double d0 = 0.2;
  for (std::size_t p : lat->inside_points())
    if (bump[p] != 0.0) { ASSERT_GE(lat->delta(p), d0); }
  const auto res = local_maximal_field(MultiField({bump, random_field(lat, 81, 0.5, 1.0)}), 0.0);
  std::size_t tested = 0;
  for (std::size_t p : lat->inside_points())
    if (lat->delta(p) < d0 / 2) {
      EXPECT_EQ(res.value[p], 0.0);
      ++tested;
    }
  EXPECT_GT(tested, 0u);
}

TEST(MaximalProperties, DyadicHomogeneityIsExact) {
  const auto lat = grid32();
  const auto f = random_field(lat, 91), g = random_field(lat, 92);
  MaxOptions o;
  o.rel_tol = 0.0;
  const auto base = local_maximal_field(MultiField({f, g}), 1.0, o);
  for (double lambda : {0.5, 2.0, 16.0}) {
    const auto scaled = local_maximal_field(MultiField({lambda * f, g}), 1.0, o);
    for (std::size_t p : lat->inside_points()) {
      EXPECT_EQ(scaled.value[p], lambda * base.value[p]);
      EXPECT_EQ(scaled.argmax_radii[p], base.argmax_radii[p]);
    }
  }
  const auto zero = local_maximal_field(MultiField({0.0 * f, g}), 1.0, o);
  for (std::size_t p : lat->inside_points()) EXPECT_EQ(zero.value[p], 0.0);
}

TEST(MaximalProperties, HomogeneityWithinQuantum) {
  // Non-dyadic factors change the fixed-point scale; values agree to the quantum 2^-46 max|f|.
  const auto lat = grid32();
  const auto f = random_field(lat, 93), g = random_field(lat, 94);
  const auto base = local_maximal_field(MultiField({f, g}), 0.0);
  for (double lambda : {3.0, 0.3, 7.5}) {
    const auto scaled = local_maximal_field(MultiField({lambda * f, g}), 0.0);
    for (std::size_t p : lat->inside_points())
      EXPECT_NEAR(scaled.value[p], lambda * base.value[p], 1e-12 * lambda);
  }
}

TEST(MaximalProperties, SlotSublinearityWithinQuantum) {
  const auto lat = grid32();
  const auto f = random_field(lat, 101), g = random_field(lat, 102), k = random_field(lat, 103);
  for (double alpha : {0.0, 1.0, 1.5}) {
    const auto sum = local_maximal_field(MultiField({f + g, k}), alpha);
    const auto mf = local_maximal_field(MultiField({f, k}), alpha);
    const auto mg = local_maximal_field(MultiField({g, k}), alpha);
    for (std::size_t p : lat->inside_points()) EXPECT_LE(sum.value[p], mf.value[p] + mg.value[p] + 1e-12);
  }
}

TEST(MaximalProperties, ThreadCountDoesNotChangeOutput) {
  const auto lat = rasterize(Domain::disk({0, 0, 0}, 1.0, 2), 1.0 / 32);
  const MultiField mf({random_field(lat, 111), random_field(lat, 112)});
  MaxOptions o;
  o.threads = 1;
  const auto a = local_maximal_field(mf, 1.0, o);
  o.threads = 4;
  const auto b = local_maximal_field(mf, 1.0, o);
  for (std::size_t p : lat->inside_points()) {
    EXPECT_EQ(a.value[p], b.value[p]);
    EXPECT_EQ(a.argmax_radii[p], b.argmax_radii[p]);
  }
  const auto s1 = spherical_maximal_field(mf.slot(0), 0.5, 1);
  const auto s4 = spherical_maximal_field(mf.slot(0), 0.5, 4);
  for (std::size_t p : lat->inside_points()) EXPECT_EQ(s1[p], s4[p]);
}

TEST(MaximalBatch, SharedBankMatchesSeparateCalls) {
  const auto lat = grid32();
  const std::vector<ScalarField> bank{random_field(lat, 121), random_field(lat, 122), random_field(lat, 123)};
  std::vector<ProductSpec> prods(3);
  prods[0].slots = {0, 1};
  prods[0].alpha = 1.0;
  prods[1].slots = {2, 1};
  prods[1].alpha = 1.0;
  prods[2].slots = {2};
  prods[2].alpha = 0.0;
  const auto out = maximal_batch(bank, prods);
  const auto r0 = local_maximal_field(MultiField({bank[0], bank[1]}), 1.0);
  const auto r1 = local_maximal_field(MultiField({bank[2], bank[1]}), 1.0);
  const auto r2 = local_maximal_field(MultiField({bank[2]}), 0.0);
  for (std::size_t p : lat->inside_points()) {
    EXPECT_EQ(out[0].value[p], r0.value[p]);
    EXPECT_EQ(out[1].value[p], r1.value[p]);
    EXPECT_EQ(out[2].value[p], r2.value[p]);
  }
}
