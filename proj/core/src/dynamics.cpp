#include "swsim/dynamics.hpp"

#include <cmath>
#include <string>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr double kSeriesCutoff = 1e-6;

template <typename State>
void validate_state(const State& s, const char* what) {
  if (s.x.size() != s.y.size() || s.x.size() != s.theta.size()) {
    throw ValidationError(std::string(what) + ": x, y, theta lengths differ");
  }
  if (s.x.size() == 0) throw ValidationError(std::string(what) + ": no agents");
  if (!s.x.allFinite() || !s.y.allFinite() || !s.theta.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entry");
  }
}

template <typename State>
Vector stack(const State& s) {
  const auto n = s.x.size();
  Vector v(3 * n);
  v << s.x, s.y, s.theta;
  return v;
}

template <typename State>
State unstack(const Vector& v) {
  if (v.size() % 3 != 0) throw ValidationError("stacked state length must be a multiple of 3");
  const auto n = v.size() / 3;
  return State{v.segment(0, n), v.segment(n, n), v.segment(2 * n, n)};
}

void require_match(int n, const WeightedGraph& g) {
  if (n != g.size()) {
    throw ValidationError("state has " + std::to_string(n) + " agents but graph has " +
                          std::to_string(g.size()));
  }
}

}  // namespace

SwarmState SwarmState::zeros(int n) { return {Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)}; }
void SwarmState::validate() const { validate_state(*this, "SwarmState"); }
Vector SwarmState::stacked() const { return stack(*this); }
SwarmState SwarmState::from_stacked(const Vector& v) { return unstack<SwarmState>(v); }

BodyFrameState BodyFrameState::zeros(int n) {
  return {Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
}
void BodyFrameState::validate() const { validate_state(*this, "BodyFrameState"); }
Vector BodyFrameState::stacked() const { return stack(*this); }
BodyFrameState BodyFrameState::from_stacked(const Vector& v) { return unstack<BodyFrameState>(v); }

void ControllerParams::validate() const {
  if (!(kv > 0.0) || !std::isfinite(kv)) throw ValidationError("controller kv must be positive");
  if (!(kw > 0.0) || !std::isfinite(kw)) throw ValidationError("controller kw must be positive");
}

ControlInput control_input(const SwarmState& s, const WeightedGraph& g,
                           const ControllerParams& params, double p) {
  const int n = s.size();
  require_match(n, g);
  ControlInput u{Vector::Zero(n), Vector::Constant(n, p)};
  const Matrix& a = g.weights();
  for (int i = 0; i < n; ++i) {
    const double ci = std::cos(s.theta(i));
    const double si = std::sin(s.theta(i));
    double dv = 0.0;
    double dw = 0.0;
    for (int j = 0; j < n; ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      dv += aij * (ci * (s.x(i) - s.x(j)) + si * (s.y(i) - s.y(j)));
      dw += aij * (s.theta(i) - s.theta(j));
    }
    u.v(i) = -params.kv * dv;
    u.w(i) -= params.kw * dw;
  }
  return u;
}

ControlInput control_input(const SwarmState& s, const WeightedGraph& g,
                           const ControllerParams& params, const ExcitationProfile& prof, double t) {
  return control_input(s, g, params, prof.p_value(t));
}

BodyFrameState body_transform(const SwarmState& s) {
  const Vector c = s.theta.array().cos();
  const Vector sn = s.theta.array().sin();
  return {c.cwiseProduct(s.x) + sn.cwiseProduct(s.y), c.cwiseProduct(s.y) - sn.cwiseProduct(s.x),
          s.theta};
}

SwarmState world_transform(const BodyFrameState& b) {
  const Vector c = b.theta.array().cos();
  const Vector sn = b.theta.array().sin();
  return {c.cwiseProduct(b.x) - sn.cwiseProduct(b.y), sn.cwiseProduct(b.x) + c.cwiseProduct(b.y),
          b.theta};
}

double dcos0(double s) {
  if (std::abs(s) < kSeriesCutoff) return -s / 2.0 + s * s * s / 24.0;
  return (std::cos(s) - 1.0) / s;
}

double dsin0(double s) {
  if (std::abs(s) < kSeriesCutoff) return 1.0 - s * s / 6.0;
  return std::sin(s) / s;
}

Matrix bstar(const BodyFrameState& b) {
  const auto n = b.x.size();
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = b.theta(i) - b.theta(j);
      m(i, j) = dcos0(d) * b.x(j) + dsin0(d) * b.y(j);
    }
  }
  return m;
}

SwarmState original_rhs(const SwarmState& s, const WeightedGraph& g,
                        const ControllerParams& params, double p) {
  const ControlInput u = control_input(s, g, params, p);
  return {s.theta.array().cos() * u.v.array(), s.theta.array().sin() * u.v.array(), u.w};
}

SwarmState original_rhs(const SwarmState& s, const WeightedGraph& g,
                        const ControllerParams& params, const ExcitationProfile& prof, double t) {
  return original_rhs(s, g, params, prof.p_value(t));
}

BodyFrameState compact_rhs(const BodyFrameState& b, const WeightedGraph& g,
                           const ControllerParams& params, double p) {
  const int n = b.size();
  require_match(n, g);
  const Matrix l = laplacian(g);
  const Vector ones = Vector::Ones(n);
  const Matrix bx = params.kv * bstar(b) - params.kw * b.y * ones.transpose();
  const Matrix by = params.kw * b.x * ones.transpose();
  BodyFrameState d;
  d.x = p * b.y - params.kv * (l * b.x) + generalized_laplacian(g, bx) * b.theta;
  d.y = -p * b.x + generalized_laplacian(g, by) * b.theta;
  d.theta = p * ones - params.kw * (l * b.theta);
  return d;
}

BodyFrameState compact_rhs(const BodyFrameState& b, const WeightedGraph& g,
                           const ControllerParams& params, const ExcitationProfile& prof, double t) {
  return compact_rhs(b, g, params, prof.p_value(t));
}

BodyFrameState changed_rhs(const BodyFrameState& b, double p) {
  return {p * b.y, -p * b.x, Vector::Constant(b.size(), p)};
}

BodyFrameState changed_rhs(const BodyFrameState& b, const ExcitationProfile& prof, double t) {
  return changed_rhs(b, prof.p_value(t));
}

}  // namespace swsim
