#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "growthctl/model.hpp"

namespace growthctl {

// A trajectory is a concatenation of arcs, each holding one vertex of the
// control polytope fixed: full enzyme production (Exponential), full storage
// production (Linear), or no production (Stationary).
enum class ArcKind { Exponential, Linear, Stationary };

const char* arc_kind_name(ArcKind kind);

Control vertex_control(const ModelParams& p, ArcKind kind);

// Requested arc duration exceeds the nutrient budget of its start state.
class NutrientDepletionError : public std::runtime_error {
 public:
  NutrientDepletionError(double nutrient, const std::string& what)
      : std::runtime_error(what), nutrient_(nutrient) {}
  double nutrient() const { return nutrient_; }

 private:
  double nutrient_;
};

class TrajectoryPlanError : public std::runtime_error {
 public:
  TrajectoryPlanError(std::size_t arc_index, double shortfall, const std::string& what)
      : std::runtime_error(what), arc_index_(arc_index), shortfall_(shortfall) {}
  std::size_t arc_index() const { return arc_index_; }
  double shortfall() const { return shortfall_; }

 private:
  std::size_t arc_index_;
  double shortfall_;
};

class TimeRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct Arc {
  ArcKind kind;
  double t_start;
  double t_end;
  State x_start;

  double duration() const { return t_end - t_start; }
};

struct ArcPlanEntry {
  ArcKind kind;
  double duration;
};

struct Trajectory {
  std::vector<Arc> arcs;
  double horizon = 0.0;
};

// An arc with no enzyme is inert under any control; it never moves and never
// drains nutrient, so its admissible duration is unbounded.
bool arc_is_degenerate(ArcKind kind, const State& x_start);

// State after `elapsed` time on one arc. Closed forms: the enzyme-production
// arc grows the enzyme exponentially at rate k_E, the storage-production arc
// grows storage linearly at rate k_M * x_E, the idle arc holds everything.
State arc_state(const ModelParams& p, ArcKind kind, const State& x_start, double elapsed);

// Longest duration for which the arc keeps the nutrient nonnegative.
// Returns +infinity for the idle arc and for degenerate starts.
double arc_max_duration(const ModelParams& p, ArcKind kind, const State& x_start);

// Integral of biomass b_M x_M + b_E x_E over one arc of the given duration.
double arc_objective(const ModelParams& p, ArcKind kind, const State& x_start, double duration);

Trajectory build_trajectory(const ModelParams& p, const State& x0,
                            const std::vector<ArcPlanEntry>& plan);

double trajectory_objective(const ModelParams& p, const Trajectory& traj);

// Evaluation at a junction time uses the later arc (controls are taken
// right-continuous); at t == horizon the final arc answers.
State state_at(const ModelParams& p, const Trajectory& traj, double t);
Control control_at(const ModelParams& p, const Trajectory& traj, double t);

State terminal_state(const ModelParams& p, const Trajectory& traj);

struct TrajectorySample {
  double t;
  State x;
  Control u;
};

std::vector<TrajectorySample> sample_trajectory(const ModelParams& p, const Trajectory& traj,
                                                std::size_t count);

}  // namespace growthctl
