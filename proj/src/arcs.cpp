#include "growthctl/arcs.hpp"

#include <cmath>
#include <limits>

namespace growthctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_arc(ArcKind kind, double duration) {
  return std::string(arc_kind_name(kind)) + " arc of duration " + std::to_string(duration);
}

}  // namespace

const char* arc_kind_name(ArcKind kind) {
  switch (kind) {
    case ArcKind::Exponential:
      return "Exponential";
    case ArcKind::Linear:
      return "Linear";
    case ArcKind::Stationary:
      return "Stationary";
  }
  return "?";
}

Control vertex_control(const ModelParams& p, ArcKind kind) {
  switch (kind) {
    case ArcKind::Exponential:
      return Control{0.0, p.k_E};
    case ArcKind::Linear:
      return Control{p.k_M, 0.0};
    case ArcKind::Stationary:
      return Control{0.0, 0.0};
  }
  return Control{0.0, 0.0};
}

bool arc_is_degenerate(ArcKind kind, const State& x_start) {
  return kind != ArcKind::Stationary && x_start.enzyme <= 0.0;
}

State arc_state(const ModelParams& p, ArcKind kind, const State& x_start, double elapsed) {
  if (elapsed < 0.0) {
    throw TimeRangeError("arc elapsed time must be nonnegative, got " + std::to_string(elapsed));
  }
  if (kind == ArcKind::Stationary || arc_is_degenerate(kind, x_start)) {
    return x_start;
  }
  State x = x_start;
  if (kind == ArcKind::Exponential) {
    const double growth = std::expm1(p.k_E * elapsed);
    x.nutrient = x_start.nutrient - p.a_E * p.b_E * x_start.enzyme * growth;
    x.enzyme = x_start.enzyme * (1.0 + growth);
  } else {
    x.nutrient = x_start.nutrient - p.a_M * p.b_M * p.k_M * x_start.enzyme * elapsed;
    x.storage = x_start.storage + p.k_M * x_start.enzyme * elapsed;
  }
  if (x.nutrient < -kNutrientTol * (1.0 + std::abs(x_start.nutrient))) {
    throw NutrientDepletionError(x.nutrient, format_arc(kind, elapsed) +
                                                 " overdraws the nutrient to " +
                                                 std::to_string(x.nutrient));
  }
  if (x.nutrient < 0.0) {
    x.nutrient = 0.0;
  }
  return x;
}

double arc_max_duration(const ModelParams& p, ArcKind kind, const State& x_start) {
  if (kind == ArcKind::Stationary || arc_is_degenerate(kind, x_start)) {
    return kInf;
  }
  if (x_start.nutrient <= 0.0) {
    return 0.0;
  }
  if (kind == ArcKind::Exponential) {
    return std::log1p(x_start.nutrient / (p.a_E * p.b_E * x_start.enzyme)) / p.k_E;
  }
  return x_start.nutrient / (p.a_M * p.b_M * p.k_M * x_start.enzyme);
}

double arc_objective(const ModelParams& p, ArcKind kind, const State& x_start, double duration) {
  if (duration < 0.0) {
    throw TimeRangeError("arc duration must be nonnegative, got " + std::to_string(duration));
  }
  const double base = biomass(p, x_start) * duration;
  if (kind == ArcKind::Stationary || arc_is_degenerate(kind, x_start)) {
    return base;
  }
  if (kind == ArcKind::Exponential) {
    return p.b_M * x_start.storage * duration +
           p.b_E * x_start.enzyme * std::expm1(p.k_E * duration) / p.k_E;
  }
  return base + 0.5 * p.b_M * p.k_M * x_start.enzyme * duration * duration;
}

Trajectory build_trajectory(const ModelParams& p, const State& x0,
                            const std::vector<ArcPlanEntry>& plan) {
  Trajectory traj;
  traj.arcs.reserve(plan.size());
  State x = x0;
  double t = 0.0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const ArcPlanEntry& entry = plan[i];
    if (entry.duration < 0.0) {
      throw TrajectoryPlanError(i, entry.duration,
                                "negative duration in " + format_arc(entry.kind, entry.duration));
    }
    const double limit = arc_max_duration(p, entry.kind, x);
    const double shortfall = entry.duration - limit;
    if (shortfall > kNutrientTol * (1.0 + entry.duration)) {
      throw TrajectoryPlanError(
          i, shortfall,
          format_arc(entry.kind, entry.duration) + " exceeds nutrient budget by " +
              std::to_string(shortfall) + " (limit " + std::to_string(limit) + ")");
    }
    const double duration = std::min(entry.duration, limit);
    traj.arcs.push_back(Arc{entry.kind, t, t + entry.duration, x});
    x = arc_state(p, entry.kind, x, duration);
    if (x.nutrient < 0.0) {
      x.nutrient = 0.0;
    }
    t += entry.duration;
  }
  traj.horizon = t;
  return traj;
}

double trajectory_objective(const ModelParams& p, const Trajectory& traj) {
  double total = 0.0;
  for (const Arc& arc : traj.arcs) {
    total += arc_objective(p, arc.kind, arc.x_start, arc.duration());
  }
  return total;
}

namespace {

const Arc& arc_containing(const Trajectory& traj, double t) {
  if (traj.arcs.empty()) {
    throw TimeRangeError("trajectory has no arcs");
  }
  if (t < 0.0 || t > traj.horizon) {
    throw TimeRangeError("time " + std::to_string(t) + " outside [0, " +
                         std::to_string(traj.horizon) + "]");
  }
  for (const Arc& arc : traj.arcs) {
    if (t < arc.t_end) {
      return arc;
    }
  }
  return traj.arcs.back();
}

}  // namespace

State state_at(const ModelParams& p, const Trajectory& traj, double t) {
  const Arc& arc = arc_containing(traj, t);
  const double elapsed = std::min(t - arc.t_start, arc.duration());
  return arc_state(p, arc.kind, arc.x_start, elapsed);
}

Control control_at(const ModelParams& p, const Trajectory& traj, double t) {
  return vertex_control(p, arc_containing(traj, t).kind);
}

State terminal_state(const ModelParams& p, const Trajectory& traj) {
  if (traj.arcs.empty()) {
    throw TimeRangeError("trajectory has no arcs");
  }
  const Arc& last = traj.arcs.back();
  return arc_state(p, last.kind, last.x_start, last.duration());
}

std::vector<TrajectorySample> sample_trajectory(const ModelParams& p, const Trajectory& traj,
                                                std::size_t count) {
  std::vector<TrajectorySample> out;
  if (count == 0) {
    return out;
  }
  out.reserve(count);
  if (count == 1) {
    out.push_back(TrajectorySample{0.0, state_at(p, traj, 0.0), control_at(p, traj, 0.0)});
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double t = traj.horizon * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(TrajectorySample{t, state_at(p, traj, t), control_at(p, traj, t)});
  }
  return out;
}

}  // namespace growthctl
