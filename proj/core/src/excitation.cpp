#include "swsim/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr double kPhaseTol = 1e-6;

struct BranchLocation {
  double period_start = 0.0;
  int branch = 0;  // 0..3 in the order of the piecewise definition
};

}  // namespace

ExcitationProfile::ExcitationProfile(double window, double period, Shape c)
    : window_(window), period_(period), shape_(std::move(c)) {
  if (!std::isfinite(window_) || window_ <= 0.0) {
    throw ValidationError("excitation: T must be positive");
  }
  if (!std::isfinite(period_) || !(period_ > 2.0 * window_)) {
    throw ValidationError("excitation: T0 must be strictly greater than 2T (T=" +
                          std::to_string(window_) + ", T0=" + std::to_string(period_) + ")");
  }
  if (auto* table = std::get_if<Table>(&shape_)) {
    if (table->times.empty() || table->times.size() != table->values.size()) {
      throw ValidationError("excitation table: times and values must be nonempty and equal length");
    }
    if (table->times.front() != 0.0) throw ValidationError("excitation table must start at t=0");
    for (std::size_t k = 1; k < table->times.size(); ++k) {
      if (!(table->times[k] > table->times[k - 1])) {
        throw ValidationError("excitation table times must be strictly increasing");
      }
    }
    for (double v : table->values) {
      if (!std::isfinite(v)) throw ValidationError("excitation table values must be finite");
    }
  } else if (!std::isfinite(std::get<Constant>(shape_).value)) {
    throw ValidationError("excitation constant must be finite");
  }
}

double ExcitationProfile::c_value(double s) const {
  if (const auto* k = std::get_if<Constant>(&shape_)) return k->value;
  const auto& tab = std::get<Table>(shape_);
  if (s <= tab.times.front()) return tab.values.front();
  if (s >= tab.times.back()) return tab.values.back();
  auto it = std::upper_bound(tab.times.begin(), tab.times.end(), s);
  const auto hi = static_cast<std::size_t>(it - tab.times.begin());
  const auto lo = hi - 1;
  const double frac = (s - tab.times[lo]) / (tab.times[hi] - tab.times[lo]);
  return tab.values[lo] + frac * (tab.values[hi] - tab.values[lo]);
}

double ExcitationProfile::c_integral(double s) const {
  if (s <= 0.0) return 0.0;
  if (const auto* k = std::get_if<Constant>(&shape_)) return k->value * s;
  const auto& tab = std::get<Table>(shape_);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < tab.times.size(); ++k) {
    const double a = tab.times[k];
    if (a >= s) return acc;
    const double b = std::min(tab.times[k + 1], s);
    acc += 0.5 * (b - a) * (tab.values[k] + c_value(b));
  }
  if (s > tab.times.back()) acc += (s - tab.times.back()) * tab.values.back();
  return acc;
}

namespace {

BranchLocation locate(double t, double window, double period) {
  double q = std::floor(t / period);
  double tau = t - q * period;
  if (tau < 0.0) {
    q -= 1.0;
    tau += period;
  } else if (tau >= period) {
    q += 1.0;
    tau -= period;
  }
  const double half = 0.5 * period;
  int branch = 3;
  if (tau < window) {
    branch = 0;
  } else if (tau < half) {
    branch = 1;
  } else if (tau < window + half) {
    branch = 2;
  }
  return {q * period, branch};
}

}  // namespace

double ExcitationProfile::p_on_branch(double anchor, double t) const {
  const auto loc = locate(anchor, window_, period_);
  switch (loc.branch) {
    case 1:
      return c_value(t - loc.period_start - window_);
    case 3:
      return -c_value(t - loc.period_start - window_ - 0.5 * period_);
    default:
      return 0.0;
  }
}

double ExcitationProfile::p_value(double t) const { return p_on_branch(t, t); }

std::vector<double> ExcitationProfile::breakpoints_between(double a, double b) const {
  std::vector<double> out;
  if (!(b > a)) return out;
  const double offsets[4] = {0.0, window_, 0.5 * period_, window_ + 0.5 * period_};
  for (double q = std::floor(a / period_) - 1.0; q * period_ <= b; q += 1.0) {
    for (double off : offsets) {
      const double t = q * period_ + off;
      if (t > a && t < b) out.push_back(t);
    }
  }
  return out;
}

double ExcitationProfile::p_integral(double a, double b) const {
  if (b < a) return -p_integral(b, a);
  // Over whole periods the integral vanishes; integrate the active
  // branches piece by piece between breakpoints.
  std::vector<double> cuts{a};
  for (double t : breakpoints_between(a, b)) cuts.push_back(t);
  cuts.push_back(b);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (!(hi > lo)) continue;
    const auto loc = locate(0.5 * (lo + hi), window_, period_);
    if (loc.branch == 1) {
      const double base = loc.period_start + window_;
      acc += c_integral(hi - base) - c_integral(lo - base);
    } else if (loc.branch == 3) {
      const double base = loc.period_start + window_ + 0.5 * period_;
      acc -= c_integral(hi - base) - c_integral(lo - base);
    }
  }
  return acc;
}

double ExcitationProfile::abs_integral_per_period() const {
  const double len = active_length();
  if (const auto* k = std::get_if<Constant>(&shape_)) return 2.0 * std::abs(k->value) * len;
  // |c| of a piecewise-linear function, integrated segment by segment with
  // sign changes resolved exactly.
  const auto& tab = std::get<Table>(shape_);
  std::vector<double> knots{0.0};
  for (double t : tab.times) {
    if (t > 0.0 && t < len) knots.push_back(t);
  }
  knots.push_back(len);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const double fa = c_value(a);
    const double fb = c_value(b);
    if (fa * fb >= 0.0) {
      acc += 0.5 * (b - a) * (std::abs(fa) + std::abs(fb));
    } else {
      const double root = a + (b - a) * fa / (fa - fb);
      acc += 0.5 * (root - a) * std::abs(fa) + 0.5 * (b - root) * std::abs(fb);
    }
  }
  return 2.0 * acc;
}

PhaseCheck check_phase_condition(const ExcitationProfile& prof) {
  PhaseCheck out;
  out.integral = prof.c_integral(prof.active_length());
  out.nearest_k = std::lround(out.integral / std::numbers::pi);
  out.distance = std::abs(out.integral - static_cast<double>(out.nearest_k) * std::numbers::pi);
  out.ok = out.distance > kPhaseTol;
  return out;
}

}  // namespace swsim
