#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles/oracles.hpp"
#include "swsim/dynamics.hpp"
#include "swsim/errors.hpp"
#include "swsim/integrator.hpp"

namespace swsim {
namespace {

constexpr double kPi = std::numbers::pi;

ExcitationProfile default_profile(double c = 5.0) {
  return ExcitationProfile(kPi, 3 * kPi, ExcitationProfile::Constant{c});
}

WeightedGraph random_graph(std::mt19937_64& rng, int n) {
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (oracle::uniform(rng, 0, 1) < 0.6) w(i, j) = w(j, i) = oracle::uniform(rng, 0.2, 2.0);
  return WeightedGraph(w);
}

SwarmState random_state(std::mt19937_64& rng, int n, double r = 3.0) {
  SwarmState s = SwarmState::zeros(n);
  for (int i = 0; i < n; ++i) {
    s.x(i) = oracle::uniform(rng, -r, r);
    s.y(i) = oracle::uniform(rng, -r, r);
    s.theta(i) = oracle::uniform(rng, -r, r);
  }
  return s;
}

GraphFamily chain_family() {
  return GraphFamily({{1, WeightedGraph::from_edges(4, std::vector<Edge>{{0, 1, 1.0}})},
                      {2, WeightedGraph::from_edges(4, std::vector<Edge>{{1, 2, 1.0}})},
                      {3, WeightedGraph::from_edges(4, std::vector<Edge>{{2, 3, 1.0}})}});
}

TEST(Excitation, BranchValues) {
  const auto p = default_profile();
  EXPECT_EQ(p.p_value(0.5), 0.0);
  EXPECT_EQ(p.p_value(kPi + 0.1), 5.0);
  EXPECT_EQ(p.p_value(1.5 * kPi + 0.1), 0.0);
  EXPECT_EQ(p.p_value(2.5 * kPi + 0.1), -5.0);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double t = oracle::uniform(rng, -50, 50);
    EXPECT_EQ(p.p_value(t), oracle::excitation(5.0, kPi, 3 * kPi, t)) << t;
  }
}

TEST(Excitation, ZeroMeanOverPeriod) {
  const auto p = default_profile();
  EXPECT_NEAR(p.p_integral(0.0, 3 * kPi), 0.0, 1e-10);
  const ExcitationProfile table(1.0, 5.0, ExcitationProfile::Table{{0.0, 0.7, 1.5}, {0.0, 2.0, -1.0}});
  EXPECT_NEAR(table.p_integral(0.0, 5.0), 0.0, 1e-12);
  double quad = 0.0;
  const int steps = 200000;
  for (int k = 0; k < steps; ++k) quad += table.p_value((k + 0.5) * 5.0 / steps) * 5.0 / steps;
  EXPECT_NEAR(quad, 0.0, 1e-6);
  EXPECT_NEAR(table.p_integral(0.3, 2.9), [&] {
    double q = 0.0;
    for (int k = 0; k < steps; ++k) q += table.p_value(0.3 + (k + 0.5) * 2.6 / steps) * 2.6 / steps;
    return q;
  }(), 1e-5);
}

TEST(Excitation, PeriodicOnRationalGrid) {
  const ExcitationProfile p(1.0, 4.0, ExcitationProfile::Constant{3.0});
  for (int k = -40; k < 40; ++k) {
    const double t = k / 8.0;
    EXPECT_EQ(p.p_value(t), p.p_value(t + 4.0));
  }
}

TEST(Excitation, TableInterpolation) {
  const ExcitationProfile p(1.0, 5.0, ExcitationProfile::Table{{0.0, 1.0}, {2.0, 4.0}});
  EXPECT_DOUBLE_EQ(p.c_value(0.5), 3.0);
  EXPECT_DOUBLE_EQ(p.c_value(3.0), 4.0);
  EXPECT_DOUBLE_EQ(p.c_integral(1.0), 3.0);
  EXPECT_THROW(ExcitationProfile(1.0, 2.0, ExcitationProfile::Constant{1.0}), ValidationError);
  EXPECT_THROW(ExcitationProfile(1.0, 5.0, ExcitationProfile::Table{{0.5, 1.0}, {1.0, 1.0}}),
               ValidationError);
}

TEST(PhaseCondition, Examples) {
  const auto ok = check_phase_condition(default_profile(5.0));
  EXPECT_TRUE(ok.ok);
  EXPECT_NEAR(ok.integral, 2.5 * kPi, 1e-12);
  const auto bad = check_phase_condition(default_profile(2.0));
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.nearest_k, 1);
  const auto zero = check_phase_condition(default_profile(0.0));
  EXPECT_FALSE(zero.ok);
  EXPECT_EQ(zero.nearest_k, 0);
}

TEST(ControlInput, Examples) {
  const auto prof = default_profile();
  const double t = kPi + 0.2;
  SwarmState same = SwarmState::zeros(3);
  same.x.setConstant(1.0);
  same.theta.setConstant(0.3);
  std::mt19937_64 rng(2);
  const auto u = control_input(same, random_graph(rng, 3), {1.0, 1.0}, prof, t);
  EXPECT_LE(u.v.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE((u.w.array() == 5.0).all());

  const auto e = control_input(random_state(rng, 3), WeightedGraph(3), {2.0, 3.0}, prof, t);
  EXPECT_TRUE(e.v.isZero());
  EXPECT_TRUE((e.w.array() == 5.0).all());

  SwarmState two = SwarmState::zeros(2);
  two.x << 1.5, 0.0;
  const auto h = control_input(two, WeightedGraph::from_edges(2, std::vector<Edge>{{0, 1, 1.0}}), {2.0, 1.0}, 0.0);
  EXPECT_DOUBLE_EQ(h.v(0), -3.0);
  EXPECT_DOUBLE_EQ(h.v(1), 3.0);
}

TEST(ControlInput, Distributed) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5;
    const auto g = random_graph(rng, n);
    SwarmState s = random_state(rng, n);
    const auto u = control_input(s, g, {1.3, 0.7}, 0.4);
    for (int i = 0; i < n; ++i) {
      SwarmState t = s;
      for (int j = 0; j < n; ++j) {
        if (j != i && g.weight(i, j) == 0.0) {
          t.x(j) = t.y(j) = t.theta(j) = 0.0;
        }
      }
      const auto v = control_input(t, g, {1.3, 0.7}, 0.4);
      EXPECT_EQ(u.v(i), v.v(i));
      EXPECT_EQ(u.w(i), v.w(i));
    }
  }
}

TEST(BodyTransform, Examples) {
  SwarmState s = SwarmState::zeros(1 + 1);
  s.x << 1.0, 2.0;
  s.y << 0.0, -1.0;
  s.theta << kPi / 2, 0.0;
  const auto b = body_transform(s);
  EXPECT_NEAR(b.x(0), 0.0, 1e-15);
  EXPECT_NEAR(b.y(0), -1.0, 1e-15);
  EXPECT_EQ(b.x(1), 2.0);
  EXPECT_EQ(b.y(1), -1.0);

  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto r = random_state(rng, 4);
    const auto rb = body_transform(r);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(rb.x(i) * rb.x(i) + rb.y(i) * rb.y(i), r.x(i) * r.x(i) + r.y(i) * r.y(i), 1e-12);
    }
    const auto back = world_transform(rb);
    EXPECT_LE((back.stacked() - r.stacked()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Bstar, EqualHeadingsAndBounds) {
  std::mt19937_64 rng(5);
  BodyFrameState b = BodyFrameState::zeros(3);
  b.x << 1, 2, 3;
  b.y << 4, 5, 6;
  b.theta.setConstant(0.7);
  const Matrix bs = bstar(b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(bs(i, j), b.y(j));

  for (int k = 0; k < 1000; ++k) {
    const double s = oracle::uniform(rng, -20, 20);
    EXPECT_LE(std::abs(dcos0(s)), 1.0);
    EXPECT_LE(std::abs(dsin0(s)), 1.0);
    EXPECT_NEAR(dcos0(s), (std::cos(s) - 1) / s, 1e-12);
  }
  EXPECT_EQ(dcos0(0.0), 0.0);
  EXPECT_EQ(dsin0(0.0), 1.0);
  EXPECT_NEAR(dcos0(1e-7), -5e-8, 1e-20);
  EXPECT_NEAR(dsin0(1e-7), 1.0 - 1e-14 / 6, 1e-20);

  for (int k = 0; k < 100; ++k) {
    const auto r = body_transform(random_state(rng, 5));
    EXPECT_LE(rho(bstar(r)), std::sqrt(10.0) * std::sqrt(r.x.squaredNorm() + r.y.squaredNorm()) + 1e-12);
  }
}

TEST(CompactRhs, ConsensusAndZeroHeading) {
  std::mt19937_64 rng(6);
  const auto g = random_graph(rng, 4);
  BodyFrameState c = BodyFrameState::zeros(4);
  c.x.setConstant(1.5);
  c.y.setConstant(-0.5);
  c.theta.setConstant(2.0);
  const auto d = compact_rhs(c, g, {1.0, 1.0}, 3.0);
  EXPECT_LE((d.x - 3.0 * c.y).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((d.y + 3.0 * c.x).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((d.theta.array() - 3.0).abs().maxCoeff(), 1e-14);

  BodyFrameState z = body_transform(random_state(rng, 4));
  z.theta.setZero();
  const auto dz = compact_rhs(z, g, {1.7, 1.0}, 0.0);
  EXPECT_LE((dz.x + 1.7 * laplacian(g) * z.x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(dz.y.isZero());
  EXPECT_TRUE(dz.theta.isZero());
}

TEST(CompactRhs, MatchesChainRuleOfOriginal) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto g = random_graph(rng, n);
    const SwarmState s = random_state(rng, n);
    const ControllerParams k{oracle::uniform(rng, 0.2, 2), oracle::uniform(rng, 0.2, 2)};
    const double p = oracle::uniform(rng, -5, 5);
    const Vector ds = oracle::unicycle_rhs(s.stacked(), g.weights(), k.kv, k.kw, p);
    EXPECT_LE((original_rhs(s, g, k, p).stacked() - ds).cwiseAbs().maxCoeff(), 1e-12);
    // d/dt of the body coordinates via the product rule.
    Vector dx(n), dy(n);
    for (int i = 0; i < n; ++i) {
      const double c = std::cos(s.theta(i)), sn = std::sin(s.theta(i));
      const double dth = ds(2 * n + i);
      dx(i) = c * ds(i) + sn * ds(n + i) + dth * (-sn * s.x(i) + c * s.y(i));
      dy(i) = -sn * ds(i) + c * ds(n + i) + dth * (-c * s.x(i) - sn * s.y(i));
    }
    const auto db = compact_rhs(body_transform(s), g, k, p);
    const double scale = std::max(1.0, ds.cwiseAbs().maxCoeff());
    EXPECT_LE((db.x - dx).cwiseAbs().maxCoeff(), 1e-12 * scale);
    EXPECT_LE((db.y - dy).cwiseAbs().maxCoeff(), 1e-12 * scale);
    EXPECT_LE((db.theta - ds.tail(n)).cwiseAbs().maxCoeff(), 1e-12 * scale);
    EXPECT_NEAR(db.theta.sum(), n * p, 1e-12 * scale * n);
  }
}

TEST(OriginalRhs, Examples) {
  SwarmState c = SwarmState::zeros(3);
  c.x.setConstant(2.0);
  c.theta.setConstant(0.4);
  std::mt19937_64 rng(8);
  const auto d = original_rhs(c, random_graph(rng, 3), {1, 1}, 1.25);
  EXPECT_TRUE(d.x.isZero());
  EXPECT_TRUE(d.y.isZero());
  EXPECT_TRUE((d.theta.array() == 1.25).all());

  SwarmState two = SwarmState::zeros(2);
  two.x << 1.0, 0.0;
  const auto g2 = WeightedGraph::from_edges(2, std::vector<Edge>{{0, 1, 1.0}});
  const auto d2 = original_rhs(two, g2, {1.0, 1.0}, 0.0);
  EXPECT_DOUBLE_EQ(d2.x(0), -1.0);
  EXPECT_DOUBLE_EQ(d2.x(1), 1.0);
  EXPECT_EQ(d2.y(0), 0.0);
  EXPECT_THROW(original_rhs(SwarmState::zeros(3), g2, {1, 1}, 0.0), ValidationError);
}

TEST(ChangedRhs, Examples) {
  std::mt19937_64 rng(9);
  const auto b = body_transform(random_state(rng, 3));
  const auto z = changed_rhs(b, 0.0);
  EXPECT_TRUE(z.x.isZero() && z.y.isZero() && z.theta.isZero());
  const auto d = changed_rhs(b, 2.0);
  EXPECT_NEAR(b.x.dot(d.x) + b.y.dot(d.y), 0.0, 1e-12);
}

TEST(Integrate, ZeroFieldIsConstant) {
  const auto fam = chain_family();
  const ExcitationProfile p(1.0, 3.0, ExcitationProfile::Constant{0.0});
  BodyFrameState b = BodyFrameState::zeros(4);
  b.x << 1, 2, 3, 4;
  const auto traj = integrate(VectorField::kChanged, SwitchSchedule::section4d(kPi), fam, {1, 1}, p,
                              b, 0.0, 5.0, 0.01);
  EXPECT_LE((traj.body(traj.size() - 1).stacked() - b.stacked()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(traj.times().back(), 5.0, 1e-12);
}

TEST(Integrate, HeadingIntegratesExcitation) {
  const auto fam = chain_family();
  const auto p = default_profile();
  const auto traj = integrate(VectorField::kChanged, SwitchSchedule::section4d(kPi), fam, {1, 1}, p,
                              BodyFrameState::zeros(4), 0.0, 3 * kPi, 1e-3);
  for (std::size_t k = 0; k < traj.size(); k += 97) {
    EXPECT_NEAR(traj.body(k).theta(0), p.p_integral(0.0, traj.time(k)), 1e-8);
  }
  EXPECT_NEAR(traj.body(traj.size() - 1).theta(2), 0.0, 1e-8);
}

TEST(Integrate, ChangedSystemConservesRadius) {
  const auto fam = chain_family();
  const auto p = default_profile();
  std::mt19937_64 rng(10);
  const auto b0 = body_transform(random_state(rng, 4));
  const double period = 3 * kPi;
  const auto traj = integrate(VectorField::kChanged, SwitchSchedule::constant(1), fam, {1, 1}, p, b0,
                              0.0, 100 * period, 1e-2);
  const auto b1 = traj.body(traj.size() - 1);
  const double u0 = b0.x.squaredNorm() + b0.y.squaredNorm();
  // RK4 does not preserve the quadratic invariant exactly; the drift is O(h^4).
  EXPECT_NEAR(b1.x.squaredNorm() + b1.y.squaredNorm(), u0, 1e-5 * u0);
  EXPECT_LE((b1.theta - b0.theta).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Integrate, FourthOrderConvergence) {
  // Smooth segment inside one excitation branch and one mode.
  const auto fam = chain_family();
  const ExcitationProfile p(0.5, 20.0, ExcitationProfile::Constant{1.3});
  std::mt19937_64 rng(11);
  const auto s0 = random_state(rng, 4, 1.0);
  auto final_state = [&](double h) {
    const auto tr = integrate(VectorField::kOriginal, SwitchSchedule::constant(2), fam, {1, 1}, p, s0,
                              1.0, 3.0, h);
    return tr.world(tr.size() - 1).stacked();
  };
  const Vector ref = final_state(1e-4);
  const double e1 = (final_state(0.04) - ref).norm();
  const double e2 = (final_state(0.02) - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Integrate, FrameConsistency) {
  const auto fam = chain_family();
  const auto p = default_profile();
  const auto sched = SwitchSchedule::section4d(kPi);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const auto s0 = random_state(rng, 4, 10.0);
    const auto a = integrate(VectorField::kOriginal, sched, fam, {1, 1}, p, s0, 0.0, 10.0, 1e-3);
    const auto b = integrate(VectorField::kCompact, sched, fam, {1, 1}, p, body_transform(s0), 0.0, 10.0, 1e-3);
    ASSERT_EQ(a.size(), b.size());
    double err = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      err = std::max(err, (body_transform(a.world(k)).stacked() - b.body(k).stacked()).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(err, 1e-5);
  }
}

TEST(Integrate, SubstepsAlignWithSwitches) {
  const auto fam = chain_family();
  const auto p = default_profile();
  const auto sched = SwitchSchedule::section4d(kPi);
  const auto tr = integrate(VectorField::kOriginal, sched, fam, {1, 1}, p, SwarmState::zeros(4), 0.0,
                            10 * kPi, 0.1);
  const auto& ts = tr.times();
  for (const auto& e : sched.switches_between(0.0, 10 * kPi)) {
    const auto it = std::lower_bound(ts.begin(), ts.end(), e.t - 1e-12);
    ASSERT_NE(it, ts.end());
    EXPECT_NEAR(*it, e.t, 1e-12);
    EXPECT_EQ(tr.mode(static_cast<std::size_t>(it - ts.begin())), e.mode) << e.t << " sample " << *it;
  }
  EXPECT_EQ(tr.switch_events(), sched.events_until(10 * kPi).size() - 1);
  for (std::size_t k = 1; k < ts.size(); ++k) EXPECT_GT(ts[k], ts[k - 1]);
}

TEST(Integrate, Errors) {
  const auto fam = chain_family();
  const auto p = default_profile();
  const auto s = SwarmState::zeros(4);
  EXPECT_THROW(integrate(VectorField::kOriginal, SwitchSchedule::constant(1), fam, {1, 1}, p, s, 0, 1, 0.0),
               ValidationError);
  EXPECT_THROW(integrate(VectorField::kOriginal, SwitchSchedule::constant(1), fam, {1, 1}, p, s, 1, 0, 0.1),
               ValidationError);
  EXPECT_THROW(integrate(VectorField::kOriginal, SwitchSchedule::section4d(kPi, 5.0), fam, {1, 1}, p, s, 0,
                         10, 0.1),
               ValidationError);
  IntegratorOptions cap;
  cap.max_events_per_step = 5;
  EXPECT_THROW(integrate(VectorField::kOriginal, SwitchSchedule::section4d(kPi), fam, {1, 1}, p, s, 0,
                         20 * kPi, 2 * kPi, cap),
               RuntimeFailure);
}

TEST(Integrate, DefaultStep) {
  const auto sched = SwitchSchedule::section4d(kPi);
  const auto p = default_profile();
  EXPECT_NEAR(default_step(sched, p, 0.0, 10.0), 1e-3 * kPi, 1e-15);
  // Periods up to k = 636 reach t = 2000; their thirds last pi / (3 * 637).
  EXPECT_NEAR(default_step(sched, p, 0.0, 2000.0), kPi / (3.0 * 637) / 4, 1e-12);
}

}  // namespace
}  // namespace swsim
