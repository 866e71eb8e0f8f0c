#pragma once

#include <variant>
#include <vector>

namespace swsim {

// The periodic excitation p(t) injected into every agent's turn rate.
//
// On one period [0, T0):
//   0             on [0, T)
//   c(t - T)      on [T, T0/2)
//   0             on [T0/2, T + T0/2)
//   -c(t - T - T0/2) on [T + T0/2, T0)
// extended T0-periodically to all of R. Requires T0 > 2T > 0.
class ExcitationProfile {
 public:
  struct Constant {
    double value = 0.0;
    friend bool operator==(const Constant&, const Constant&) = default;
  };
  // Linear interpolation between samples; held constant past the last one.
  // times[0] must be 0 and times must be strictly increasing.
  struct Table {
    std::vector<double> times;
    std::vector<double> values;
    friend bool operator==(const Table&, const Table&) = default;
  };
  using Shape = std::variant<Constant, Table>;

  ExcitationProfile(double window, double period, Shape c);

  double window() const { return window_; }  // T
  double period() const { return period_; }  // T0
  const Shape& shape() const { return shape_; }

  // Length of the active branch, T0/2 - T.
  double active_length() const { return 0.5 * period_ - window_; }

  double c_value(double s) const;
  // Integral of c over [0, s], exact for both shapes.
  double c_integral(double s) const;

  double p_value(double t) const;

  // p(t) on the branch (and period) that contains `anchor`. Used by the
  // integrator so that a sub-step ending on a breakpoint keeps the left limit.
  double p_on_branch(double anchor, double t) const;

  // Breakpoints of p (offsets 0, T, T0/2, T + T0/2 of every period) in (a, b).
  std::vector<double> breakpoints_between(double a, double b) const;

  // Integral of p over [a, b], exact.
  double p_integral(double a, double b) const;

  // Integral of |p| over one period: 2 * integral of |c| over the active branch.
  double abs_integral_per_period() const;

  friend bool operator==(const ExcitationProfile&, const ExcitationProfile&) = default;

 private:
  double window_;
  double period_;
  Shape shape_;
};

struct PhaseCheck {
  bool ok = false;
  double integral = 0.0;   // integral of c over [0, T0/2 - T)
  long nearest_k = 0;      // k minimising |integral - k*pi|
  double distance = 0.0;   // |integral - nearest_k*pi|
};

// The excitation drives consensus only if the active-branch integral of c
// stays away from the lattice k*pi (distance > 1e-6).
PhaseCheck check_phase_condition(const ExcitationProfile& prof);

}  // namespace swsim
