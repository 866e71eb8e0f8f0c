#pragma once

#include "swsim/excitation.hpp"
#include "swsim/graph.hpp"

namespace swsim {

// World-frame unicycle coordinates. Headings live on R, never wrapped.
struct SwarmState {
  Vector x;
  Vector y;
  Vector theta;

  static SwarmState zeros(int n);
  int size() const { return static_cast<int>(x.size()); }

  // Throws ValidationError on ragged or non-finite data.
  void validate() const;

  // [x; y; theta]
  Vector stacked() const;
  static SwarmState from_stacked(const Vector& v);
};

// Positions rotated into each agent's own body frame; theta unchanged.
struct BodyFrameState {
  Vector x;
  Vector y;
  Vector theta;

  static BodyFrameState zeros(int n);
  int size() const { return static_cast<int>(x.size()); }
  void validate() const;
  Vector stacked() const;
  static BodyFrameState from_stacked(const Vector& v);
};

struct ControllerParams {
  double kv = 1.0;
  double kw = 1.0;

  void validate() const;
  friend bool operator==(const ControllerParams&, const ControllerParams&) = default;
};

// Forward speed v_i and turn rate w_i per agent.
struct ControlInput {
  Vector v;
  Vector w;
};

// Distributed feedback: each agent reads only its neighbours in g.
//   v_i = -kv sum_j a_ij [cos th_i, sin th_i] . (p_i - p_j)
//   w_i = p - kw sum_j a_ij (th_i - th_j)
ControlInput control_input(const SwarmState& s, const WeightedGraph& g,
                           const ControllerParams& params, double p);
ControlInput control_input(const SwarmState& s, const WeightedGraph& g,
                           const ControllerParams& params, const ExcitationProfile& prof, double t);

BodyFrameState body_transform(const SwarmState& s);
SwarmState world_transform(const BodyFrameState& b);

// (cos s - 1)/s and sin(s)/s with their limits at 0; series below |s| < 1e-6.
double dcos0(double s);
double dsin0(double s);

// B_*(i, j) = dcos0(th_i - th_j) x_j + dsin0(th_i - th_j) y_j.
Matrix bstar(const BodyFrameState& b);

// Unicycle kinematics under control_input.
SwarmState original_rhs(const SwarmState& s, const WeightedGraph& g,
                        const ControllerParams& params, double p);
SwarmState original_rhs(const SwarmState& s, const WeightedGraph& g,
                        const ControllerParams& params, const ExcitationProfile& prof, double t);

// Closed loop in body-frame coordinates:
//   x' = p y - kv L x + L(g, kv B_* - kw y 1^T) theta
//   y' = -p x + L(g, kw x 1^T) theta
//   theta' = p 1 - kw L theta
BodyFrameState compact_rhs(const BodyFrameState& b, const WeightedGraph& g,
                           const ControllerParams& params, double p);
BodyFrameState compact_rhs(const BodyFrameState& b, const WeightedGraph& g,
                           const ControllerParams& params, const ExcitationProfile& prof, double t);

// Zeroing-output system: x' = p y, y' = -p x, theta' = p 1.
BodyFrameState changed_rhs(const BodyFrameState& b, double p);
BodyFrameState changed_rhs(const BodyFrameState& b, const ExcitationProfile& prof, double t);

}  // namespace swsim
