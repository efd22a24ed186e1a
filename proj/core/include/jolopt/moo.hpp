#pragma once

#include <functional>
#include <string>
#include <vector>

#include "jolopt/solver.hpp"

namespace jolopt::moo {

/// Objective vector in minimization orientation (maximized objectives are
/// negated by whoever builds the point).
struct ObjectivePoint {
  std::vector<double> values;
  std::string tag;
};

/// p <= q componentwise with at least one strict inequality.
bool dominates(const ObjectivePoint& p, const ObjectivePoint& q);

/// Points dominated by no other point, in input order. Equal points do not
/// dominate each other, so duplicates survive.
std::vector<ObjectivePoint> pareto_filter(const std::vector<ObjectivePoint>& points);

struct ParetoArchive {
  std::vector<ObjectivePoint> points;
  std::vector<std::string> excluded;
  std::vector<double> norm_factors;  // empty until normalized
};

/// A tag is excluded when it equals an entry or starts with "<entry>/".
bool is_excluded(const std::string& tag, const std::vector<std::string>& exclusions);

/// Drops excluded tags, then divides objective m by max |f_m| over what is
/// left. Throws kAllExcluded or kZeroObjective.
ParetoArchive normalize(const ParetoArchive& archive, const std::vector<std::string>& exclusions);

/// Area dominated by the points inside the box bounded by ref. Points that do
/// not strictly dominate ref contribute nothing. Throws kRefInvalid.
double hypervolume_2d(const std::vector<ObjectivePoint>& points, const std::vector<double>& ref);

/// Componentwise max plus margin.
std::vector<double> reference_point(const std::vector<ObjectivePoint>& points,
                                    double margin = 0.1);

/// Normalization factors and reference point fixed from one pool of raw points
/// so that hypervolumes of different point sets are comparable.
struct HvFrame {
  std::vector<double> factors;
  std::vector<double> reference;
  std::vector<std::string> exclusions;
};

HvFrame make_frame(const std::vector<ObjectivePoint>& raw_pool,
                   const std::vector<std::string>& exclusions, double margin = 0.1);

/// Normalizes raw points with the frame (dropping excluded tags) and returns
/// their hypervolume.
double frame_hypervolume(const HvFrame& frame, const std::vector<ObjectivePoint>& raw_points);

struct WeightPair {
  double w1 = 1.0;
  double w2 = 0.0;
};

/// (0.1k, 1 - 0.1k) for k = 0..count-1 when count = 11; in general evenly
/// spaced w1 from 0 to 1.
std::vector<WeightPair> uniform_weights(int count = 11);

using ObjectiveFn = std::function<std::vector<double>(const Vector& x, const Vector& theta)>;

/// A scalarized problem plus the objective vector it trades off.
struct SweepProblem {
  JointProblem problem;
  ObjectiveFn objectives;
};

struct CurvePoint {
  double at = 0.0;  // global iteration or seconds
  double hv = 0.0;
};

struct SweepResult {
  std::vector<WeightPair> weights;
  std::vector<std::string> tags;
  std::vector<GridOutcome> runs;
  std::vector<ObjectiveFn> evaluators;  // one per weight
  std::vector<ObjectivePoint> finals;   // raw, one per successful run
  ParetoArchive archive;                // normalized, exclusions removed
  HvFrame frame;
  double hypervolume = 0.0;
  double time_budget_s = 0.0;
  std::vector<CurvePoint> hv_vs_iter;
  std::vector<CurvePoint> hv_vs_time;
};

struct SweepOptions {
  std::vector<std::string> exclusions;
  std::string tag_prefix;
  bool parallel = false;
  unsigned jobs = 0;
  double margin = 0.1;
};

/// Runs run_mslo once per weight pair (through run_grid), pools the final
/// objective vectors into a normalized archive and evaluates hypervolume along
/// the iteration and time axes in the frame of the final archive. A failing
/// weight is reported in runs[i].error and left out of the archive.
///
/// The time axis uses a grid of 200 steps over the wall-clock budget (or the
/// longest run when no budget is set); each run contributes its last snapshot
/// at or before the grid time.
SweepResult weight_sweep(const std::function<SweepProblem(const WeightPair&)>& factory,
                         const SolverConfig& config, const std::vector<WeightPair>& weights,
                         const SweepOptions& options = {});

/// Raw objective vectors of the sweep's non-failed runs at iteration k, each
/// taken from its last record with record.k <= k.
std::vector<ObjectivePoint> snapshot_at_iter(const SweepResult& sweep, std::uint64_t k);

/// Recomputes the hypervolume and both curves in another frame, e.g. one
/// pooled over several sweeps.
void reframe(SweepResult& sweep, const HvFrame& frame);

}  // namespace jolopt::moo
