#include "swsim/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr double kCheckTol = 1e-8;
constexpr double kPremiseTol = 1e-6;
constexpr int kSubsteps = 20;

std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  std::vector<double> c(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) c[k] = c[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return c;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  // 53 random mantissa bits; platform independent unlike uniform_real_distribution.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

void GronwallInstance::validate() const {
  const std::size_t n = times.size();
  if (n < 2 || alpha1.size() != n || alpha2.size() != n || alpha3.size() != n) {
    throw ValidationError("GronwallInstance: need >= 2 samples and equal-length arrays");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw ValidationError("GronwallInstance: grid must be strictly increasing");
    }
    if (!(alpha1[k] >= 0.0) || !(alpha2[k] >= 0.0) || !(alpha3[k] >= 0.0)) {
      throw ValidationError("GronwallInstance: functions must be nonnegative (sample " +
                            std::to_string(k) + ")");
    }
  }
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = -alpha2[k] + alpha3[k] * (1.0 + alpha1[k]);
  // The grid form of the premise carries O(h^3 f'') trapezoid error; a slack of
  // 1e-3 h |f| absorbs it and still flags sign or scaling mistakes.
  for (std::size_t k = 1; k < n; ++k) {
    const double h = times[k] - times[k - 1];
    const double rise = alpha1[k] - alpha1[k - 1];
    const double quad = 1e-3 * h * std::max({1.0, std::abs(f[k - 1]), std::abs(f[k])});
    const double tol = kPremiseTol * std::max({1.0, alpha1[k], alpha1[k - 1]}) + quad;
    if (rise > 0.5 * h * (f[k - 1] + f[k]) + tol) {
      throw ValidationError("GronwallInstance: differential inequality violated on [" +
                            std::to_string(times[k - 1]) + ", " + std::to_string(times[k]) + "]");
    }
  }
}

GronwallResult gronwall_check(const GronwallInstance& inst) {
  inst.validate();
  const std::size_t n = inst.times.size();
  const auto c3 = cumulative_trapezoid(inst.times, inst.alpha3);
  const auto c2 = cumulative_trapezoid(inst.times, inst.alpha2);

  GronwallResult r;
  r.growth_ok = true;
  r.energy_ok = true;
  r.growth_margin = std::numeric_limits<double>::infinity();
  r.energy_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double base = 1.0 + inst.alpha1[i];
    for (std::size_t j = i; j < n; ++j) {
      const double rhs = std::exp(c3[j] - c3[i]) * base - 1.0;
      const double margin = rhs - inst.alpha1[j];
      r.growth_margin = std::min(r.growth_margin, margin);
      r.growth_max_gap = std::max(r.growth_max_gap, std::abs(margin));
      if (margin < -kCheckTol * std::max(1.0, std::abs(rhs))) r.growth_ok = false;
    }
    const double beta = c3.back() - c3[i];
    const double be = beta * std::exp(beta);
    const double rhs = be + (1.0 + be) * inst.alpha1[i];
    const double margin = rhs - (c2.back() - c2[i]);
    r.energy_margin = std::min(r.energy_margin, margin);
    if (margin < -kCheckTol * std::max(1.0, std::abs(rhs))) r.energy_ok = false;
  }
  return r;
}

GronwallInstance gronwall_closed_form(double rate, double alpha1_start, double horizon,
                                      std::size_t samples) {
  if (samples < 2 || !(horizon > 0.0) || rate < 0.0 || alpha1_start < 0.0) {
    throw ValidationError("gronwall_closed_form: bad parameters");
  }
  GronwallInstance inst;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = horizon * static_cast<double>(k) / static_cast<double>(samples - 1);
    inst.times.push_back(t);
    inst.alpha1.push_back((1.0 + alpha1_start) * std::exp(rate * t) - 1.0);
    inst.alpha2.push_back(0.0);
    inst.alpha3.push_back(rate);
  }
  return inst;
}

GronwallInstance gronwall_forward_instance(std::uint64_t seed, double horizon, std::size_t samples) {
  std::mt19937_64 rng(seed);
  const double amp3 = uniform(rng, 0.0, 1.0);
  const double decay3 = uniform(rng, 0.2, 1.5);
  const double freq3 = uniform(rng, 0.5, 5.0);
  const double phase3 = uniform(rng, 0.0, 6.283185307179586);
  const double kappa0 = uniform(rng, 0.05, 2.0);
  const double freq2 = uniform(rng, 0.5, 5.0);
  const double start = uniform(rng, 0.0, 5.0);

  auto alpha3 = [&](double t) {
    return amp3 * std::exp(-decay3 * t) * (1.0 + 0.5 * std::sin(freq3 * t + phase3));
  };
  auto kappa = [&](double t) { return kappa0 * (1.0 + 0.5 * std::sin(freq2 * t)); };

  // alpha2 and alpha3 are the linear interpolants of their samples, so the
  // trapezoid rule integrates them exactly and only RK4 error remains in alpha1.
  auto advance = [](double a1, double t, double dt, double a2l, double a2r, double a3l, double a3r) {
    auto rhs = [&](double tau, double y) {
      const double u = (tau - t) / dt;
      const double a2 = a2l + u * (a2r - a2l);
      const double a3 = a3l + u * (a3r - a3l);
      return -a2 + a3 * (1.0 + y);
    };
    const double dh = dt / kSubsteps;
    for (int s = 0; s < kSubsteps; ++s) {
      const double tt = t + dh * s;
      const double k1 = rhs(tt, a1);
      const double k2 = rhs(tt + 0.5 * dh, a1 + 0.5 * dh * k1);
      const double k3 = rhs(tt + 0.5 * dh, a1 + 0.5 * dh * k2);
      const double k4 = rhs(tt + dh, a1 + dh * k3);
      a1 += dh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return a1;
  };

  GronwallInstance inst;
  const double h = horizon / static_cast<double>(samples - 1);
  double a1 = start;
  double a2 = 0.5 * kappa(0.0) * a1;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = h * static_cast<double>(k);
    inst.times.push_back(t);
    inst.alpha1.push_back(a1);
    inst.alpha2.push_back(a2);
    inst.alpha3.push_back(alpha3(t));
    if (k + 1 == samples) break;
    const double t1 = h * static_cast<double>(k + 1);
    const double predicted = advance(a1, t, h, a2, a2, alpha3(t), alpha3(t1));
    const double a2_next = 0.5 * kappa(t1) * std::max(predicted, 0.0);
    a1 = advance(a1, t, h, a2, a2_next, alpha3(t), alpha3(t1));
    a2 = a2_next;
  }
  return inst;
}

}  // namespace swsim
