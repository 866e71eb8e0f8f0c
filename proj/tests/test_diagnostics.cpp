#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles/oracles.hpp"
#include "swsim/diagnostics.hpp"
#include "swsim/errors.hpp"
#include "swsim/integrator.hpp"

namespace swsim {
namespace {

constexpr double kPi = std::numbers::pi;

GraphFamily chain_family() {
  return GraphFamily({{1, WeightedGraph::from_edges(4, std::vector<Edge>{{0, 1, 1.0}})},
                      {2, WeightedGraph::from_edges(4, std::vector<Edge>{{1, 2, 1.0}})},
                      {3, WeightedGraph::from_edges(4, std::vector<Edge>{{2, 3, 1.0}})}});
}

ExcitationProfile default_profile(double c = 5.0) {
  return ExcitationProfile(kPi, 3 * kPi, ExcitationProfile::Constant{c});
}

SwarmState random_state(std::mt19937_64& rng, int n, double r) {
  SwarmState s = SwarmState::zeros(n);
  for (int i = 0; i < n; ++i) {
    s.x(i) = oracle::uniform(rng, -r, r);
    s.y(i) = oracle::uniform(rng, -r, r);
    s.theta(i) = oracle::uniform(rng, -r, r);
  }
  return s;
}

Trajectory default_run(std::uint64_t seed, double tf, double step) {
  std::mt19937_64 rng(seed);
  return integrate(VectorField::kOriginal, SwitchSchedule::section4d(kPi), chain_family(), {1, 1},
                   default_profile(), random_state(rng, 4, 10.0), 0.0, tf, step);
}

TEST(ConsensusDistance, Examples) {
  BodyFrameState c = BodyFrameState::zeros(3);
  c.x.setConstant(2.0);
  c.theta.setConstant(-1.0);
  EXPECT_NEAR(consensus_distance(c), 0.0, 1e-15);
  BodyFrameState two = BodyFrameState::zeros(2);
  two.x << 1.0, -1.0;
  EXPECT_NEAR(consensus_distance(two), std::sqrt(2.0), 1e-15);

  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    BodyFrameState b = body_transform(random_state(rng, 4, 5.0));
    const double d = consensus_distance(b);
    b.x.array() += oracle::uniform(rng, -3, 3);
    b.y.array() += oracle::uniform(rng, -3, 3);
    b.theta.array() += oracle::uniform(rng, -3, 3);
    EXPECT_NEAR(consensus_distance(b), d, 1e-12);
  }
}

TEST(ThetaHat, Examples) {
  EXPECT_TRUE(theta_hat(Vector::Constant(3, 0.7)).isZero(1e-15));
  Vector t(2);
  t << 1.0, 0.0;
  const Vector h = theta_hat(t);
  EXPECT_DOUBLE_EQ(h(0), 0.5);
  EXPECT_DOUBLE_EQ(h(1), -0.5);
  Vector r(4);
  r << 0.3, -2.0, 5.0, 1.0;
  EXPECT_LE((theta_hat(theta_hat(r)) - theta_hat(r)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(theta_hat(r).sum(), 0.0, 1e-14);
}

TEST(Monitors, Examples) {
  BodyFrameState c = BodyFrameState::zeros(3);
  c.x.setConstant(2.0);
  c.y.setConstant(1.0);
  c.theta.setConstant(4.0);
  const auto m = monitor_values(c);
  EXPECT_NEAR(m.W, 0.0, 1e-15);
  EXPECT_NEAR(m.V, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(m.U, 3 * (4.0 + 1.0));

  BodyFrameState two = BodyFrameState::zeros(2);
  two.x << 1.0, 3.0;
  two.y << 0.0, 2.0;
  two.theta << 1.0, -1.0;
  const auto h = monitor_values(two);
  EXPECT_DOUBLE_EQ(h.W, 2.0);
  EXPECT_DOUBLE_EQ(h.U, 14.0);
  EXPECT_DOUBLE_EQ(h.V, 2.0 + 2.0 + 2.0);

  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    const auto r = monitor_values(body_transform(random_state(rng, 5, 4.0)));
    EXPECT_LE(r.V, r.U + r.W + 1e-12);
  }
}

TEST(VirtualOutputs, Examples) {
  const auto g = WeightedGraph::from_edges(2, std::vector<Edge>{{0, 1, 1.0}});
  EXPECT_EQ(virtual_output_h1(Vector::Zero(2), g, 1.0), 0.0);
  Vector th(2);
  th << 0.5, -0.5;
  EXPECT_NEAR(virtual_output_h1(th, g, 1.0), std::sqrt(2.0), 1e-15);

  BodyFrameState c = BodyFrameState::zeros(2);
  c.x.setConstant(3.0);
  c.theta.setConstant(1.0);
  const auto h0 = virtual_output_h(c.x, c.theta, g, 1.0);
  EXPECT_NEAR(h0.norm(), 0.0, 1e-15);

  std::mt19937_64 rng(3);
  const auto fam = chain_family();
  for (int k = 0; k < 50; ++k) {
    const auto s = random_state(rng, 4, 3.0);
    const auto& gg = fam.at(1 + static_cast<int>(rng() % 3));
    const double kv = oracle::uniform(rng, 0.5, 2.0);
    const auto h = virtual_output_h(s.x, s.theta, gg, kv);
    const Eigen::MatrixXd L = oracle::laplacian(gg.weights());
    EXPECT_NEAR(h(0), std::sqrt(2 * kv * s.x.dot(L * s.x)), 1e-12);
    EXPECT_NEAR(h(1), (s.theta.array() - s.theta.mean()).matrix().norm(), 1e-12);
  }
}

TEST(Channels, WNonincreasingAndDerivative) {
  const auto tr = default_run(4, 30.0, 1e-4);
  const auto fam = chain_family();
  const auto ch = compute_channels(tr, fam, {1, 1});
  for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(ch.W[k], ch.W[k - 1] + 1e-9);
  const auto check = check_w_derivative(tr, fam, {1, 1}, 1e-4);
  EXPECT_GT(check.intervals, 100000u);
  EXPECT_LT(check.max_error, 1e-3);
  EXPECT_LE(check.max_increase, 1e-9);
}

TEST(Channels, EnergyH1MatchesDecreaseOfW) {
  const auto tr = default_run(5, 40.0, 1e-3);
  const auto ch = compute_channels(tr, chain_family(), {1, 1});
  for (double s : {0.0, 5.0, 17.3, 30.0}) {
    const auto e = output_energy(tr, ch, OutputChannel::kH1, s, 40.0);
    EXPECT_GE(e.integral, 0.0);
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(tr.times().begin(), tr.times().end(), e.s) - tr.times().begin());
    EXPECT_DOUBLE_EQ(e.bound, ch.W[k]);
    EXPECT_NEAR(e.integral, ch.W[k] - ch.W.back(), 1e-5 * std::max(1.0, ch.W[k]));
  }
  EXPECT_THROW(output_energy(tr, ch, OutputChannel::kH1, -1.0, 10.0), ValidationError);
  EXPECT_THROW(output_energy(tr, ch, OutputChannel::kH, 0.0, 10.0), ValidationError);
}

TEST(EnergyBound, ExamplesAndMonotone) {
  const auto fam = chain_family();
  const auto prof = default_profile();
  const BoundConstants k(fam, {1, 1}, prof, 1.5, 0.3);
  EXPECT_NEAR(k.a_tilde(), 2 * std::sqrt(2.0) * 1.5 * 4 * 1.0 * 2.0, 1e-12);
  BodyFrameState c = BodyFrameState::zeros(4);
  c.x.setConstant(1.0);
  c.y.setConstant(2.0);
  EXPECT_DOUBLE_EQ(energy_bound_rhs(c, k), 4 * 5.0);

  BodyFrameState two = BodyFrameState::zeros(2);
  two.x << 1.0, 0.0;
  two.theta << 0.5, 0.0;
  const GraphFamily pair({{1, WeightedGraph::from_edges(2, std::vector<Edge>{{0, 1, 1.0}})}});
  const BoundConstants kp(pair, {1, 1}, prof, 1.0, 1.0);
  const double at = 2 * std::sqrt(2.0) * 2 * 2.0;
  const double f1 = std::exp(at * 0.5 / 2.0) * std::sqrt(2.0);
  EXPECT_NEAR(kp.f1(two), f1, 1e-12);
  EXPECT_NEAR(energy_bound_rhs(two, kp), 1.0 + at * 0.5 * (1 + f1 * f1) + 0.5 * 0.25, 1e-9);
  EXPECT_NEAR(kp.f2(two.theta), 2 * 0.5 + std::sqrt(2.0) * 5.0 * kPi, 1e-12);

  double last = 0.0;
  for (double th = 0.0; th < 3.0; th += 0.1) {
    two.theta << th, 0.0;
    const double b = energy_bound_rhs(two, kp);
    EXPECT_GE(b, last);
    last = b;
  }
  EXPECT_THROW(BoundConstants(fam, {1, 1}, prof, 1.0, 0.0), ValidationError);
}

TEST(DecayFit, Examples) {
  std::vector<double> t, v;
  for (int k = 0; k < 50; ++k) {
    t.push_back(0.1 * k);
    v.push_back(3.0 * std::exp(-0.7 * 0.1 * k));
  }
  const auto f = fit_exponential_decay(t, v);
  EXPECT_NEAR(f.b_hat, 0.7, 1e-6);
  EXPECT_GE(f.a_hat, 1.0);
  EXPECT_NEAR(f.residual, 0.0, 1e-9);

  const auto c = fit_exponential_decay(t, std::vector<double>(50, 2.0));
  EXPECT_NEAR(c.b_hat, 0.0, 1e-12);

  const auto z = fit_exponential_decay(t, std::vector<double>(50, 0.0));
  EXPECT_TRUE(z.converged);
  EXPECT_TRUE(std::isinf(z.b_hat));

  EXPECT_THROW(fit_exponential_decay(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)),
               ValidationError);

  const auto run = fit_exponential_decay(default_run(6, 60.0, 1e-3));
  EXPECT_GT(run.b_hat, 0.0);
}

TEST(PhaseCheck, Examples) {
  const auto prof = default_profile(5.0);
  EXPECT_TRUE(weak_obs_phase_check(prof, 0.0, 0.3, 0).boundary_consistent);
  for (double psi : {0.0, 0.5, 1.0, kPi / 2, kPi, 4.0}) {
    EXPECT_FALSE(weak_obs_phase_check(prof, 1.0, psi, 0).boundary_consistent);
  }
  EXPECT_TRUE(weak_obs_phase_check(default_profile(2.0), 1.0, 0.0, 0).boundary_consistent);
  EXPECT_TRUE(weak_obs_phase_check(default_profile(2.0), 1.0, 0.0, 2).boundary_consistent);

  int rejected = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (long m = 0; m < 2; ++m) {
        const double r = 0.1 + i;
        const double psi = 2 * kPi * j / 5.0;
        rejected += weak_obs_phase_check(prof, r, psi, m).boundary_consistent ? 0 : 1;
      }
    }
  }
  EXPECT_EQ(rejected, 100);
}

TEST(PhaseCheck, CandidateSolvesChangedSystem) {
  // The candidate evolves like the x-component of (x, y)' = p (y, -x) on an active block.
  const auto prof = default_profile(5.0);
  const double r = 1.3, psi = 0.4;
  for (long m : {0L, 1L}) {
    const double a = kPi + m * 1.5 * kPi;
    const double b = (m + 1) * 1.5 * kPi;
    const double h = 1e-6;
    for (double t = a + 0.1; t < b - 0.1; t += 0.3) {
      const double d = (zeroing_candidate(prof, r, psi, m, t + h) - zeroing_candidate(prof, r, psi, m, t - h)) / (2 * h);
      const double x = zeroing_candidate(prof, r, psi, m, t);
      // |x'|^2 / p^2 + x^2 = r^2 for a rotation with angular rate p.
      const double p = prof.p_value(t);
      EXPECT_NEAR(d * d / (p * p) + x * x, r * r, 1e-6);
    }
  }
}

TEST(SlidingWindow, Examples) {
  const auto tr = default_run(7, 40.0, 1e-3);
  Channels zero = compute_channels(tr, chain_family(), {1, 1});
  std::fill(zero.energy_h.begin(), zero.energy_h.end(), 0.0);
  for (const auto& [t, e] : sliding_window_energy(tr, zero, OutputChannel::kH, 3 * kPi)) EXPECT_EQ(e, 0.0);

  Channels flat = zero;
  for (std::size_t k = 0; k < tr.size(); ++k) flat.energy_h[k] = 2.0 * tr.time(k);
  for (const auto& [t, e] : sliding_window_energy(tr, flat, OutputChannel::kH, 3 * kPi)) {
    EXPECT_NEAR(e, 6 * kPi, 1e-9);
  }
  EXPECT_THROW(sliding_window_energy(tr, flat, OutputChannel::kH, 50.0), ValidationError);
}

TEST(SlidingWindow, DecreasesOnDefaultRun) {
  const auto tr = default_run(8, 110.0, 1e-3);
  const auto ch = compute_channels(tr, chain_family(), {1, 1});
  const auto series = sliding_window_energy(tr, ch, OutputChannel::kH, 3 * kPi);
  EXPECT_TRUE(decreasing_trend(series));
  const auto at100 = std::lower_bound(series.begin(), series.end(), std::make_pair(100.0 - 3 * kPi, 0.0));
  ASSERT_NE(at100, series.end());
  EXPECT_LT(at100->second, 1e-4);
}

TEST(Boundedness, StateStaysBelowF) {
  const auto tr = default_run(9, 60.0, 1e-3);
  const auto fam = chain_family();
  const auto fit = fit_exponential_decay(tr);
  ASSERT_GT(fit.b_hat, 0.0);
  const BoundConstants k(fam, {1, 1}, default_profile(), fit.a_hat, fit.b_hat);
  for (std::size_t s = 0; s < tr.size(); s += tr.size() / 10) {
    const double f = k.f(tr.body(s));
    for (std::size_t t = s; t < tr.size(); t += 50) EXPECT_LE(tr.body(t).stacked().norm(), f);
  }
}

TEST(TimeToThreshold, FirstCrossing) {
  const auto tr = default_run(10, 100.0, 1e-3);
  const auto ch = compute_channels(tr, chain_family(), {1, 1});
  const auto t = time_to_threshold(tr, ch, 1e-2);
  ASSERT_TRUE(t.has_value());
  for (std::size_t k = 0; k < tr.size() && tr.time(k) < *t; ++k) EXPECT_GE(ch.dist_omega[k], 1e-2);
  EXPECT_FALSE(time_to_threshold(tr, ch, 0.0).has_value());
}

}  // namespace
}  // namespace swsim
