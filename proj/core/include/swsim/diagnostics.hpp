#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "swsim/dynamics.hpp"
#include "swsim/integrator.hpp"

namespace swsim {

// Distance to the consensus subspace {(s 1, t 1, l 1)}:
// sqrt(|L0 x|^2 + |L0 y|^2 + |L0 theta|^2).
double consensus_distance(const BodyFrameState& b);

// theta - mean(theta) 1.
Vector theta_hat(const Vector& theta);

struct Monitors {
  double W = 0.0;  // |L0 theta|^2
  double U = 0.0;  // |x|^2 + |y|^2
  double V = 0.0;  // consensus_distance^2
};

Monitors monitor_values(const BodyFrameState& b);

// sqrt(2 kw th^T L th). Throws RuntimeFailure if the quadratic form is below -1e-12.
double virtual_output_h1(const Vector& theta_hat, const WeightedGraph& g, double kw);

// [sqrt(2 kv x^T L x), |L0 theta|].
Eigen::Vector2d virtual_output_h(const Vector& x, const Vector& theta, const WeightedGraph& g,
                                 double kv);

enum class OutputChannel { kH1, kH };

// Per-sample monitors plus running output energies of a trajectory.
//
// On each interval between samples the graph is the one active at the left
// sample, so the energy integrands are evaluated with that graph at both
// ends; jumps at switch instants therefore do not bleed into the quadrature.
struct Channels {
  std::vector<double> dist_omega;
  std::vector<double> W;
  std::vector<double> U;
  std::vector<double> V;
  std::vector<double> h1;
  std::vector<double> h_norm_sq;
  std::vector<double> energy_h1;  // cumulative integral of h1^2 from the first sample
  std::vector<double> energy_h;   // cumulative integral of |h|^2
};

Channels compute_channels(const Trajectory& traj, const GraphFamily& family,
                          const ControllerParams& params);

// Decay-rate and envelope constants (a, b) of |theta_hat(t)| <= a e^{-b(t-s)} |theta_hat(s)|,
// together with the derived quantities of the boundedness and energy estimates.
class BoundConstants {
 public:
  BoundConstants(const GraphFamily& family, const ControllerParams& params,
                 const ExcitationProfile& prof, double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  // 2 sqrt(2) a N kv max_z |L(z)|
  double a_tilde() const { return a_tilde_; }

  // e^{a~ |theta| / (2b)} (1 + |x|^2 + |y|^2)^{1/2}
  double f1(const BodyFrameState& s) const;
  // (a + 1) |theta| + sqrt(N) * integral of |p| over one period
  double f2(const Vector& theta) const;
  // sqrt(F1^2 + F2^2): bound on |state(t)| for all t >= s.
  double f(const BodyFrameState& s) const;

 private:
  double a_;
  double b_;
  double a_tilde_;
  double n_;
  double abs_p_per_period_;
};

// Upper bound on the h-output energy over [s, inf) given the state at s:
// |x|^2 + |y|^2 + (a~/b)|theta| (1 + F1^2) + (a^2 / 2b) |theta|^2.
// May overflow to +inf for large headings; that is still a valid bound.
double energy_bound_rhs(const BodyFrameState& at_s, const BoundConstants& consts);

struct EnergyReport {
  OutputChannel channel = OutputChannel::kH1;
  double s = 0.0;  // window, snapped to trajectory samples
  double t = 0.0;
  double integral = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  // True when the bound used fitted (a, b) rather than proven constants.
  bool fitted_constants = false;
};

// Trapezoid energy of the chosen output over [s, t]. For h1 the bound is
// |theta_hat(s)|^2; for h it is energy_bound_rhs with `consts` (required).
EnergyReport output_energy(const Trajectory& traj, const Channels& ch, OutputChannel which,
                           double s, double t, const std::optional<BoundConstants>& consts = {},
                           bool fitted_constants = true);

struct DecayFit {
  double a_hat = 1.0;
  double b_hat = 0.0;
  double residual = 0.0;  // RMS of the log-space residual
  std::size_t samples = 0;
  bool converged = false;  // channel already below 1e-12 everywhere; b_hat = +inf
};

// Least-squares line through log(values) against t - times.front() on samples
// above 1e-12. a_hat = max(1, exp(intercept - log(values.front()))), b_hat = -slope.
DecayFit fit_exponential_decay(const std::vector<double>& times, const std::vector<double>& values);
// Fits |theta_hat| along the trajectory.
DecayFit fit_exponential_decay(const Trajectory& traj);

struct PhaseCandidate {
  bool boundary_consistent = false;
  double at_block_start = 0.0;  // r sin(psi)
  double at_block_end = 0.0;    // r sin((-1)^m I + psi)
};

// Closed-form zeroing-output candidate [L0 x](t) = r sin((-1)^m C(t - T - m T0/2) + psi)
// on the active block [T + m T0/2, (m+1) T0/2), with C the running integral of c.
double zeroing_candidate(const ExcitationProfile& prof, double r, double psi, long m, double t);

// Tests whether the candidate can vanish at both ends of the active block.
PhaseCandidate weak_obs_phase_check(const ExcitationProfile& prof, double r, double psi, long m);

// (t, energy over [t, t + T0]) for every sample t with t + T0 inside the trajectory.
std::vector<std::pair<double, double>> sliding_window_energy(const Trajectory& traj,
                                                             const Channels& ch,
                                                             OutputChannel which, double period);

// Finite-horizon surrogate for "window energy tends to zero":
// last window below first window * 1e-3.
bool decreasing_trend(const std::vector<std::pair<double, double>>& series);

struct WDerivativeCheck {
  double max_error = 0.0;     // max |dW/dt + h1^2| over checked intervals
  double max_increase = 0.0;  // max W(t_{k+1}) - W(t_k)
  std::size_t intervals = 0;  // intervals compared
};

// Compares the finite-difference derivative of W with -h1^2 (trapezoid
// average of both ends, active graph of the interval). Intervals with an
// endpoint within `exclusion` of a switch instant are skipped.
WDerivativeCheck check_w_derivative(const Trajectory& traj, const GraphFamily& family,
                                    const ControllerParams& params, double exclusion);

// Smallest first sample time at which the consensus distance drops below threshold.
std::optional<double> time_to_threshold(const Trajectory& traj, const Channels& ch,
                                        double threshold);

}  // namespace swsim
