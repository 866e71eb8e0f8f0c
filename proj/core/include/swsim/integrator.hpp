#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "swsim/dynamics.hpp"
#include "swsim/switching.hpp"

namespace swsim {

enum class VectorField {
  kOriginal,  // unicycle kinematics in the world frame
  kCompact,   // closed loop in body-frame coordinates
  kChanged,   // zeroing-output system (p-driven rotation only)
};

// Time-stamped simulation record. Every accepted (sub-)step is one sample;
// samples store both frames and the controller inputs at the sample time.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(int agents);

  int agents() const { return agents_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<Mode>& modes() const { return modes_; }
  double time(std::size_t k) const { return times_[k]; }
  Mode mode(std::size_t k) const { return modes_[k]; }

  SwarmState world(std::size_t k) const;
  BodyFrameState body(std::size_t k) const;
  ControlInput input(std::size_t k) const;

  // Throws ValidationError if t does not strictly increase.
  void append(double t, Mode mode, const SwarmState& world, const BodyFrameState& body,
              const ControlInput& input);

  // Switch instants of the schedule crossed during integration.
  const std::vector<double>& switch_times() const { return switch_times_; }
  std::size_t switch_events() const { return switch_times_.size(); }
  void set_switch_times(std::vector<double> times) { switch_times_ = std::move(times); }

 private:
  int agents_ = 0;
  std::vector<double> times_;
  std::vector<Mode> modes_;
  std::vector<double> world_;  // 3n per sample: x, y, theta
  std::vector<double> body_;   // 2n per sample: x~, y~
  std::vector<double> input_;  // 2n per sample: v, w
  std::vector<double> switch_times_;
};

struct IntegratorOptions {
  // Abort if one nominal step would have to be cut at more switch instants.
  std::size_t max_events_per_step = 10'000;
};

using InitialState = std::variant<SwarmState, BodyFrameState>;

// Classical fixed-step RK4. Each nominal step [t0 + k h, t0 + (k+1) h] is cut
// at every switch instant of `sched` and every breakpoint of p inside it, so
// the right-hand side is smooth on every sub-step. The mode and p-branch of a
// sub-step are those active on its interior.
Trajectory integrate(VectorField field, const SwitchSchedule& sched, const GraphFamily& family,
                     const ControllerParams& params, const ExcitationProfile& prof,
                     const InitialState& initial, double t0, double tf, double step,
                     const IntegratorOptions& opts = {});

// min(1e-3 * scale, smallest switch gap in [t0, tf] / 4), floored at 1e-6 s,
// where scale is T' for generated schedules and the excitation window otherwise.
double default_step(const SwitchSchedule& sched, const ExcitationProfile& prof, double t0,
                    double tf);

}  // namespace swsim
