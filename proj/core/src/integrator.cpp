#include "swsim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "swsim/errors.hpp"

namespace swsim {
namespace {

constexpr double kMinStep = 1e-6;

// Cut points closer than this (relative to |t|) are merged.
double merge_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

using Rhs = std::function<Vector(double t, const Vector& state)>;

Vector rk4_step(const Rhs& f, double t, double h, const Vector& y) {
  const Vector k1 = f(t, y);
  const Vector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const Vector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const Vector k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory::Trajectory(int agents) : agents_(agents) {}

SwarmState Trajectory::world(std::size_t k) const {
  const auto n = static_cast<std::size_t>(agents_);
  const double* base = world_.data() + 3 * n * k;
  Eigen::Map<const Vector> all(base, static_cast<Eigen::Index>(3 * n));
  return SwarmState::from_stacked(all);
}

BodyFrameState Trajectory::body(std::size_t k) const {
  const auto n = static_cast<Eigen::Index>(agents_);
  const double* base = body_.data() + 2 * agents_ * k;
  BodyFrameState b;
  b.x = Eigen::Map<const Vector>(base, n);
  b.y = Eigen::Map<const Vector>(base + n, n);
  b.theta = Eigen::Map<const Vector>(world_.data() + 3 * agents_ * k + 2 * n, n);
  return b;
}

ControlInput Trajectory::input(std::size_t k) const {
  const auto n = static_cast<Eigen::Index>(agents_);
  const double* base = input_.data() + 2 * agents_ * k;
  return {Eigen::Map<const Vector>(base, n), Eigen::Map<const Vector>(base + n, n)};
}

void Trajectory::append(double t, Mode mode, const SwarmState& world, const BodyFrameState& body,
                        const ControlInput& input) {
  if (!times_.empty() && !(t > times_.back())) {
    throw ValidationError("trajectory times must be strictly increasing");
  }
  if (world.size() != agents_ || body.size() != agents_ || input.v.size() != agents_) {
    throw ValidationError("trajectory sample has the wrong agent count");
  }
  times_.push_back(t);
  modes_.push_back(mode);
  const Vector w = world.stacked();
  world_.insert(world_.end(), w.data(), w.data() + w.size());
  body_.insert(body_.end(), body.x.data(), body.x.data() + agents_);
  body_.insert(body_.end(), body.y.data(), body.y.data() + agents_);
  input_.insert(input_.end(), input.v.data(), input.v.data() + agents_);
  input_.insert(input_.end(), input.w.data(), input.w.data() + agents_);
}

Trajectory integrate(VectorField field, const SwitchSchedule& sched, const GraphFamily& family,
                     const ControllerParams& params, const ExcitationProfile& prof,
                     const InitialState& initial, double t0, double tf, double step,
                     const IntegratorOptions& opts) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("integrate: step must be positive");
  if (!(tf > t0)) throw ValidationError("integrate: need tf > t0");
  if (t0 < sched.t0()) throw ValidationError("integrate: t0 precedes the schedule start");
  if (sched.horizon() < tf) {
    throw ValidationError("integrate: schedule horizon " + std::to_string(sched.horizon()) +
                          " is shorter than tf=" + std::to_string(tf));
  }
  params.validate();

  const bool world_frame = field == VectorField::kOriginal;
  Vector state = std::visit(
      [&](const auto& s) -> Vector {
        s.validate();
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SwarmState>) {
          return world_frame ? s.stacked() : body_transform(s).stacked();
        } else {
          return world_frame ? world_transform(s).stacked() : s.stacked();
        }
      },
      initial);
  const int n = static_cast<int>(state.size() / 3);
  if (n != family.size()) {
    throw ValidationError("integrate: initial state has " + std::to_string(n) +
                          " agents, graph family has " + std::to_string(family.size()));
  }

  Trajectory traj(n);
  auto record = [&](double t, const Vector& y) {
    const Mode mode = sched.mode_at(t);
    SwarmState w;
    BodyFrameState b;
    if (world_frame) {
      w = SwarmState::from_stacked(y);
      b = body_transform(w);
    } else {
      b = BodyFrameState::from_stacked(y);
      w = world_transform(b);
    }
    traj.append(t, mode, w, b, control_input(w, family.at(mode), params, prof.p_value(t)));
  };
  record(t0, state);

  std::vector<double> cuts;
  std::vector<double> kept;
  double t = t0;
  for (long k = 0; t < tf; ++k) {
    double t_next = std::min(t0 + static_cast<double>(k + 1) * step, tf);
    if (tf - t_next <= merge_tol(tf)) t_next = tf;
    if (t_next - t <= merge_tol(t_next)) {
      t = std::max(t, t_next);
      continue;
    }

    const auto switches = sched.switches_between(t, t_next);
    if (switches.size() > opts.max_events_per_step) {
      throw RuntimeFailure("integrate: " + std::to_string(switches.size()) +
                           " switch instants inside the step starting at t=" + std::to_string(t) +
                           " exceed the cap of " + std::to_string(opts.max_events_per_step) +
                           "; reduce the step or the horizon");
    }
    cuts.clear();
    for (const auto& sw : switches) cuts.push_back(sw.t);
    for (double b : prof.breakpoints_between(t, t_next)) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    // Drop cuts that would create slivers; the step end always survives. Of two
    // near-coincident cuts the later one is kept, so the sample is not before either.
    kept.clear();
    double prev = t;
    for (double c : cuts) {
      if (t_next - c <= merge_tol(t_next)) continue;
      if (c - prev > merge_tol(c)) {
        kept.push_back(c);
        prev = c;
      } else if (!kept.empty()) {
        kept.back() = c;
        prev = c;
      }
    }
    kept.push_back(t_next);

    double a = t;
    for (double b : kept) {
      const double mid = 0.5 * (a + b);
      const WeightedGraph& g = family.at(sched.mode_at(mid));
      Rhs rhs;
      switch (field) {
        case VectorField::kOriginal:
          rhs = [&](double tt, const Vector& y) {
            return original_rhs(SwarmState::from_stacked(y), g, params, prof.p_on_branch(mid, tt))
                .stacked();
          };
          break;
        case VectorField::kCompact:
          rhs = [&](double tt, const Vector& y) {
            return compact_rhs(BodyFrameState::from_stacked(y), g, params,
                               prof.p_on_branch(mid, tt))
                .stacked();
          };
          break;
        case VectorField::kChanged:
          rhs = [&](double tt, const Vector& y) {
            return changed_rhs(BodyFrameState::from_stacked(y), prof.p_on_branch(mid, tt))
                .stacked();
          };
          break;
      }
      state = rk4_step(rhs, a, b - a, state);
      if (!state.allFinite()) {
        throw RuntimeFailure("integrate: state became non-finite at t=" + std::to_string(b));
      }
      record(b, state);
      a = b;
    }
    t = t_next;
  }

  std::vector<double> crossed;
  for (const auto& sw : sched.switches_between(t0, std::nextafter(tf, tf + 1.0))) {
    crossed.push_back(sw.t);
  }
  traj.set_switch_times(std::move(crossed));
  return traj;
}

double default_step(const SwitchSchedule& sched, const ExcitationProfile& prof, double t0,
                    double tf) {
  const double scale =
      sched.kind() == SwitchSchedule::Kind::kSection4d ? sched.t_prime() : prof.window();
  double h = 1e-3 * scale;
  const double gap = minimum_switch_gap(sched, t0, tf);
  if (std::isfinite(gap)) h = std::min(h, gap / 4.0);
  return std::max(h, kMinStep);
}

}  // namespace swsim
