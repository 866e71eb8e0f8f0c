#include "swsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr double kRadicandTol = 1e-12;
constexpr double kDecayFloor = 1e-12;
constexpr std::size_t kMinFitSamples = 10;

Vector centered(const Vector& v) { return v.array() - v.mean(); }

double checked_quadratic_form(const Vector& v, const Matrix& l) {
  const double q = v.dot(l * v);
  if (q < -kRadicandTol) {
    throw RuntimeFailure("virtual output: negative quadratic form " + std::to_string(q) +
                         " (Laplacian not positive semi-definite?)");
  }
  return std::max(q, 0.0);
}

double h1_sq(const Vector& theta, const Matrix& l, double kw) {
  return 2.0 * kw * checked_quadratic_form(centered(theta), l);
}

double h_sq(const Vector& x, const Vector& theta, const Matrix& l, double kv) {
  return 2.0 * kv * checked_quadratic_form(x, l) + centered(theta).squaredNorm();
}

std::size_t first_index_at_or_after(const std::vector<double>& times, double s) {
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), s - 1e-12) -
                                  times.begin());
}

std::size_t last_index_at_or_before(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12);
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

double interpolate_cumulative(const std::vector<double>& times, const std::vector<double>& cum,
                              double t) {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) return cum.back();
  const auto hi = static_cast<std::size_t>(it - times.begin());
  if (hi == 0 || times[hi] == t) return cum[hi];
  const auto lo = hi - 1;
  const double frac = (t - times[lo]) / (times[hi] - times[lo]);
  return cum[lo] + frac * (cum[hi] - cum[lo]);
}

}  // namespace

double consensus_distance(const BodyFrameState& b) {
  return std::sqrt(centered(b.x).squaredNorm() + centered(b.y).squaredNorm() +
                   centered(b.theta).squaredNorm());
}

Vector theta_hat(const Vector& theta) { return centered(theta); }

Monitors monitor_values(const BodyFrameState& b) {
  Monitors m;
  m.W = centered(b.theta).squaredNorm();
  m.U = b.x.squaredNorm() + b.y.squaredNorm();
  m.V = centered(b.x).squaredNorm() + centered(b.y).squaredNorm() + m.W;
  return m;
}

double virtual_output_h1(const Vector& theta_hat, const WeightedGraph& g, double kw) {
  if (theta_hat.size() != g.size()) throw ValidationError("virtual_output_h1: size mismatch");
  return std::sqrt(2.0 * kw * checked_quadratic_form(theta_hat, laplacian(g)));
}

Eigen::Vector2d virtual_output_h(const Vector& x, const Vector& theta, const WeightedGraph& g,
                                 double kv) {
  if (x.size() != g.size() || theta.size() != g.size()) {
    throw ValidationError("virtual_output_h: size mismatch");
  }
  return {std::sqrt(2.0 * kv * checked_quadratic_form(x, laplacian(g))), centered(theta).norm()};
}

Channels compute_channels(const Trajectory& traj, const GraphFamily& family,
                          const ControllerParams& params) {
  Channels ch;
  const std::size_t count = traj.size();
  for (auto* v : {&ch.dist_omega, &ch.W, &ch.U, &ch.V, &ch.h1, &ch.h_norm_sq, &ch.energy_h1,
                  &ch.energy_h}) {
    v->resize(count);
  }
  std::map<Mode, Matrix> laplacians;
  for (const auto& [mode, g] : family.graphs()) laplacians.emplace(mode, laplacian(g));

  BodyFrameState prev;
  for (std::size_t k = 0; k < count; ++k) {
    const BodyFrameState b = traj.body(k);
    const Matrix& l = laplacians.at(traj.mode(k));
    const Monitors m = monitor_values(b);
    ch.W[k] = m.W;
    ch.U[k] = m.U;
    ch.V[k] = m.V;
    ch.dist_omega[k] = std::sqrt(m.V);
    const double h1sq = h1_sq(b.theta, l, params.kw);
    ch.h1[k] = std::sqrt(h1sq);
    ch.h_norm_sq[k] = h_sq(b.x, b.theta, l, params.kv);
    if (k == 0) {
      ch.energy_h1[k] = 0.0;
      ch.energy_h[k] = 0.0;
    } else {
      const double dt = traj.time(k) - traj.time(k - 1);
      const Matrix& lp = laplacians.at(traj.mode(k - 1));
      const double a1 = h1_sq(prev.theta, lp, params.kw);
      const double b1 = h1_sq(b.theta, lp, params.kw);
      const double a2 = h_sq(prev.x, prev.theta, lp, params.kv);
      const double b2 = h_sq(b.x, b.theta, lp, params.kv);
      ch.energy_h1[k] = ch.energy_h1[k - 1] + 0.5 * dt * (a1 + b1);
      ch.energy_h[k] = ch.energy_h[k - 1] + 0.5 * dt * (a2 + b2);
    }
    prev = b;
  }
  return ch;
}

BoundConstants::BoundConstants(const GraphFamily& family, const ControllerParams& params,
                               const ExcitationProfile& prof, double a, double b)
    : a_(a), b_(b), n_(family.size()), abs_p_per_period_(prof.abs_integral_per_period()) {
  if (!(b_ > 0.0)) throw ValidationError("BoundConstants: decay rate b must be positive");
  if (!(a_ > 0.0)) throw ValidationError("BoundConstants: envelope a must be positive");
  a_tilde_ = 2.0 * std::numbers::sqrt2 * a_ * n_ * params.kv * family.max_laplacian_norm();
  if (!(a_tilde_ > 0.0)) throw ValidationError("BoundConstants: family has no edges");
}

double BoundConstants::f1(const BodyFrameState& s) const {
  return std::exp(a_tilde_ * s.theta.norm() / (2.0 * b_)) *
         std::sqrt(1.0 + s.x.squaredNorm() + s.y.squaredNorm());
}

double BoundConstants::f2(const Vector& theta) const {
  return (a_ + 1.0) * theta.norm() + std::sqrt(n_) * abs_p_per_period_;
}

double BoundConstants::f(const BodyFrameState& s) const { return std::hypot(f1(s), f2(s.theta)); }

double energy_bound_rhs(const BodyFrameState& at_s, const BoundConstants& consts) {
  const double th = at_s.theta.norm();
  const double f1 = consts.f1(at_s);
  return at_s.x.squaredNorm() + at_s.y.squaredNorm() +
         (consts.a_tilde() / consts.b()) * th * (1.0 + f1 * f1) +
         (consts.a() * consts.a() / (2.0 * consts.b())) * th * th;
}

EnergyReport output_energy(const Trajectory& traj, const Channels& ch, OutputChannel which,
                           double s, double t, const std::optional<BoundConstants>& consts,
                           bool fitted_constants) {
  if (traj.empty()) throw ValidationError("output_energy: empty trajectory");
  const auto& times = traj.times();
  if (!(t >= s) || s < times.front() - 1e-12 || t > times.back() + 1e-12) {
    throw ValidationError("output_energy: window [" + std::to_string(s) + ", " +
                          std::to_string(t) + "] outside the trajectory");
  }
  const std::size_t i = first_index_at_or_after(times, s);
  const std::size_t j = std::max(i, last_index_at_or_before(times, t));
  const auto& cum = which == OutputChannel::kH1 ? ch.energy_h1 : ch.energy_h;

  EnergyReport r;
  r.channel = which;
  r.s = times[i];
  r.t = times[j];
  r.integral = cum[j] - cum[i];
  if (which == OutputChannel::kH1) {
    r.bound = ch.W[i];
    r.fitted_constants = false;
  } else {
    if (!consts) throw ValidationError("output_energy: h-channel bound needs BoundConstants");
    r.bound = energy_bound_rhs(traj.body(i), *consts);
    r.fitted_constants = fitted_constants;
  }
  r.slack = r.bound - r.integral;
  return r;
}

DecayFit fit_exponential_decay(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size() || times.empty()) {
    throw ValidationError("fit_exponential_decay: times and values must be nonempty, equal length");
  }
  DecayFit fit;
  const double origin = times.front();
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(values[k] > kDecayFloor)) continue;
    const double t = times[k] - origin;
    const double l = std::log(values[k]);
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    ++m;
  }
  fit.samples = m;
  if (m == 0) {
    fit.converged = true;
    fit.b_hat = std::numeric_limits<double>::infinity();
    fit.a_hat = 1.0;
    return fit;
  }
  if (m < kMinFitSamples) {
    throw ValidationError("fit_exponential_decay: only " + std::to_string(m) +
                          " samples above 1e-12, need 10");
  }
  const double md = static_cast<double>(m);
  const double denom = md * stt - st * st;
  double slope = 0.0;
  double intercept = sl / md;
  if (denom > 0.0) {
    slope = (md * stl - st * sl) / denom;
    intercept = (sl - slope * st) / md;
  }
  double ss = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(values[k] > kDecayFloor)) continue;
    const double e = std::log(values[k]) - (intercept + slope * (times[k] - origin));
    ss += e * e;
  }
  fit.b_hat = -slope;
  fit.residual = std::sqrt(ss / md);
  fit.a_hat = values.front() > kDecayFloor
                  ? std::max(1.0, std::exp(intercept - std::log(values.front())))
                  : 1.0;
  return fit;
}

DecayFit fit_exponential_decay(const Trajectory& traj) {
  std::vector<double> norms(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) norms[k] = theta_hat(traj.body(k).theta).norm();
  return fit_exponential_decay(traj.times(), norms);
}

double zeroing_candidate(const ExcitationProfile& prof, double r, double psi, long m, double t) {
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  const double offset = prof.window() + static_cast<double>(m) * 0.5 * prof.period();
  return r * std::sin(sign * prof.c_integral(t - offset) + psi);
}

PhaseCandidate weak_obs_phase_check(const ExcitationProfile& prof, double r, double psi, long m) {
  const double start = prof.window() + static_cast<double>(m) * 0.5 * prof.period();
  const double end = static_cast<double>(m + 1) * 0.5 * prof.period();
  PhaseCandidate out;
  out.at_block_start = zeroing_candidate(prof, r, psi, m, start);
  out.at_block_end = zeroing_candidate(prof, r, psi, m, end);
  const double tol = 1e-9 * std::max(1.0, std::abs(r));
  out.boundary_consistent =
      std::abs(out.at_block_start) <= tol && std::abs(out.at_block_end) <= tol;
  return out;
}

std::vector<std::pair<double, double>> sliding_window_energy(const Trajectory& traj,
                                                             const Channels& ch,
                                                             OutputChannel which, double period) {
  if (traj.empty() || !(traj.times().back() - traj.times().front() > period)) {
    throw ValidationError("sliding_window_energy: trajectory shorter than the window");
  }
  const auto& times = traj.times();
  const auto& cum = which == OutputChannel::kH1 ? ch.energy_h1 : ch.energy_h;
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < times.size() && times[k] + period <= times.back(); ++k) {
    out.emplace_back(times[k], interpolate_cumulative(times, cum, times[k] + period) - cum[k]);
  }
  return out;
}

bool decreasing_trend(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 2) return false;
  return series.back().second < series.front().second * 1e-3;
}

WDerivativeCheck check_w_derivative(const Trajectory& traj, const GraphFamily& family,
                                    const ControllerParams& params, double exclusion) {
  WDerivativeCheck out;
  const auto& sw = traj.switch_times();
  auto near_switch = [&](double t) {
    auto it = std::lower_bound(sw.begin(), sw.end(), t - exclusion);
    return it != sw.end() && *it <= t + exclusion;
  };
  std::map<Mode, Matrix> laplacians;
  for (const auto& [mode, g] : family.graphs()) laplacians.emplace(mode, laplacian(g));

  for (std::size_t k = 1; k < traj.size(); ++k) {
    const Vector th0 = traj.body(k - 1).theta;
    const Vector th1 = traj.body(k).theta;
    const double w0 = centered(th0).squaredNorm();
    const double w1 = centered(th1).squaredNorm();
    out.max_increase = std::max(out.max_increase, w1 - w0);
    const double t0 = traj.time(k - 1);
    const double t1 = traj.time(k);
    const double dt = t1 - t0;
    if (dt < 1e-9 || near_switch(t0) || near_switch(t1)) continue;
    const Matrix& l = laplacians.at(traj.mode(k - 1));
    const double avg = 0.5 * (h1_sq(th0, l, params.kw) + h1_sq(th1, l, params.kw));
    out.max_error = std::max(out.max_error, std::abs((w1 - w0) / dt + avg));
    ++out.intervals;
  }
  return out;
}

std::optional<double> time_to_threshold(const Trajectory& traj, const Channels& ch,
                                        double threshold) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (ch.dist_omega[k] < threshold) return traj.time(k);
  }
  return std::nullopt;
}

}  // namespace swsim
