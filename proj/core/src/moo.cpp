#include "jolopt/moo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "jolopt/error.hpp"

namespace jolopt::moo {
namespace {

void check_same_m(const ObjectivePoint& p, const ObjectivePoint& q) {
  if (p.values.size() != q.values.size()) {
    throw Error(ErrorCode::kDimMismatch, "objective vectors differ in length");
  }
}

const TrajectoryRecord& record_at(const Trajectory& traj, std::uint64_t k) {
  const TrajectoryRecord* best = &traj.records.front();
  for (const auto& rec : traj.records) {
    if (rec.k > k) break;
    best = &rec;
  }
  return *best;
}

const TrajectoryRecord& record_at_time(const Trajectory& traj, double t) {
  const TrajectoryRecord* best = &traj.records.front();
  for (const auto& rec : traj.records) {
    if (rec.wall_clock_s > t) break;
    best = &rec;
  }
  return *best;
}

std::vector<ObjectivePoint> snapshot_at_time(const SweepResult& sweep, double t) {
  std::vector<ObjectivePoint> pts;
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    if (!sweep.runs[i].ok()) continue;
    const auto& rec = record_at_time(*sweep.runs[i].trajectory, t);
    pts.push_back({sweep.evaluators[i](rec.x, rec.theta), sweep.tags[i]});
  }
  return pts;
}

void compute_curves(SweepResult& sweep) {
  sweep.hv_vs_iter.clear();
  sweep.hv_vs_time.clear();
  std::set<std::uint64_t> ks;
  double longest = 0.0;
  for (const auto& run : sweep.runs) {
    if (!run.ok()) continue;
    for (const auto& rec : run.trajectory->records) ks.insert(rec.k);
    longest = std::max(longest, run.trajectory->records.back().wall_clock_s);
  }
  if (ks.empty()) return;
  for (std::uint64_t k : ks) {
    sweep.hv_vs_iter.push_back(
        {static_cast<double>(k), frame_hypervolume(sweep.frame, snapshot_at_iter(sweep, k))});
  }
  const double budget = sweep.time_budget_s > 0.0 ? sweep.time_budget_s : longest;
  constexpr int kTimeSteps = 200;
  for (int s = 0; s <= kTimeSteps; ++s) {
    const double t = budget * static_cast<double>(s) / kTimeSteps;
    sweep.hv_vs_time.push_back({t, frame_hypervolume(sweep.frame, snapshot_at_time(sweep, t))});
  }
}

}  // namespace

bool dominates(const ObjectivePoint& p, const ObjectivePoint& q) {
  check_same_m(p, q);
  bool strict = false;
  for (std::size_t m = 0; m < p.values.size(); ++m) {
    if (p.values[m] > q.values[m]) return false;
    if (p.values[m] < q.values[m]) strict = true;
  }
  return strict;
}

std::vector<ObjectivePoint> pareto_filter(const std::vector<ObjectivePoint>& points) {
  if (points.empty()) return {};
  const std::size_t m = points.front().values.size();
  for (const auto& p : points) {
    if (p.values.size() != m) throw Error(ErrorCode::kDimMismatch, "inconsistent objective count");
  }
  std::vector<ObjectivePoint> kept;
  if (m == 2) {
    // Sort by (f1, f2); a point survives iff no earlier point in that order
    // has f2 strictly smaller, or an equal f2 with a strictly smaller f1.
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& pa = points[a].values;
      const auto& pb = points[b].values;
      return pa[0] < pb[0] || (pa[0] == pb[0] && pa[1] < pb[1]);
    });
    std::vector<char> keep(points.size(), 0);
    double best_f2 = std::numeric_limits<double>::infinity();
    double best_f1_at_best = std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
      const auto& v = points[idx].values;
      const bool dominated =
          v[1] > best_f2 || (v[1] == best_f2 && v[0] > best_f1_at_best);
      if (!dominated) keep[idx] = 1;
      if (v[1] < best_f2) {
        best_f2 = v[1];
        best_f1_at_best = v[0];
      }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (keep[i]) kept.push_back(points[i]);
    }
    return kept;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
      dominated = j != i && dominates(points[j], points[i]);
    }
    if (!dominated) kept.push_back(points[i]);
  }
  return kept;
}

bool is_excluded(const std::string& tag, const std::vector<std::string>& exclusions) {
  for (const auto& ex : exclusions) {
    if (tag == ex) return true;
    if (tag.size() > ex.size() && tag.compare(0, ex.size(), ex) == 0 && tag[ex.size()] == '/') {
      return true;
    }
  }
  return false;
}

ParetoArchive normalize(const ParetoArchive& archive, const std::vector<std::string>& exclusions) {
  ParetoArchive out;
  out.excluded = archive.excluded;
  for (const auto& p : archive.points) {
    if (is_excluded(p.tag, exclusions)) {
      out.excluded.push_back(p.tag);
    } else {
      out.points.push_back(p);
    }
  }
  if (out.points.empty()) throw Error(ErrorCode::kAllExcluded, "no points left after exclusions");
  const std::size_t m = out.points.front().values.size();
  out.norm_factors.assign(m, 0.0);
  for (const auto& p : out.points) {
    if (p.values.size() != m) throw Error(ErrorCode::kDimMismatch, "inconsistent objective count");
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(p.values[j])) {
        throw Error(ErrorCode::kZeroObjective, "objective value is not finite for " + p.tag);
      }
      out.norm_factors[j] = std::max(out.norm_factors[j], std::abs(p.values[j]));
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(out.norm_factors[j] > 0.0)) {
      throw Error(ErrorCode::kZeroObjective,
                  "objective " + std::to_string(j) + " is zero on every retained point");
    }
  }
  for (auto& p : out.points) {
    for (std::size_t j = 0; j < m; ++j) p.values[j] /= out.norm_factors[j];
  }
  return out;
}

double hypervolume_2d(const std::vector<ObjectivePoint>& points, const std::vector<double>& ref) {
  if (ref.size() != 2 || !std::isfinite(ref[0]) || !std::isfinite(ref[1])) {
    throw Error(ErrorCode::kRefInvalid, "reference point must be two finite values");
  }
  std::vector<std::pair<double, double>> inside;
  for (const auto& p : points) {
    if (p.values.size() != 2) throw Error(ErrorCode::kDimMismatch, "hypervolume_2d needs m = 2");
    if (p.values[0] < ref[0] && p.values[1] < ref[1]) inside.emplace_back(p.values[0], p.values[1]);
  }
  std::sort(inside.begin(), inside.end());
  double area = 0.0;
  double ceiling = ref[1];
  for (const auto& [f1, f2] : inside) {
    if (f2 < ceiling) {
      area += (ref[0] - f1) * (ceiling - f2);
      ceiling = f2;
    }
  }
  return area;
}

std::vector<double> reference_point(const std::vector<ObjectivePoint>& points, double margin) {
  if (points.empty()) throw Error(ErrorCode::kRefInvalid, "no points to derive a reference from");
  std::vector<double> ref(points.front().values.size(), -std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    for (std::size_t j = 0; j < ref.size(); ++j) ref[j] = std::max(ref[j], p.values[j]);
  }
  for (double& r : ref) r += margin;
  return ref;
}

HvFrame make_frame(const std::vector<ObjectivePoint>& raw_pool,
                   const std::vector<std::string>& exclusions, double margin) {
  const ParetoArchive norm =
      normalize(ParetoArchive{.points = raw_pool, .excluded = {}, .norm_factors = {}}, exclusions);
  return HvFrame{.factors = norm.norm_factors,
                 .reference = reference_point(norm.points, margin),
                 .exclusions = exclusions};
}

double frame_hypervolume(const HvFrame& frame, const std::vector<ObjectivePoint>& raw_points) {
  std::vector<ObjectivePoint> pts;
  for (const auto& p : raw_points) {
    if (is_excluded(p.tag, frame.exclusions)) continue;
    ObjectivePoint q = p;
    for (std::size_t j = 0; j < q.values.size() && j < frame.factors.size(); ++j) {
      q.values[j] /= frame.factors[j];
    }
    pts.push_back(std::move(q));
  }
  return hypervolume_2d(pareto_filter(pts), frame.reference);
}

std::vector<WeightPair> uniform_weights(int count) {
  std::vector<WeightPair> out;
  if (count < 1) return out;
  if (count == 1) return {WeightPair{1.0, 0.0}};
  for (int k = 0; k < count; ++k) {
    const double w1 = static_cast<double>(k) / static_cast<double>(count - 1);
    out.push_back({w1, 1.0 - w1});
  }
  return out;
}

std::vector<ObjectivePoint> snapshot_at_iter(const SweepResult& sweep, std::uint64_t k) {
  std::vector<ObjectivePoint> pts;
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    if (!sweep.runs[i].ok()) continue;
    const auto& rec = record_at(*sweep.runs[i].trajectory, k);
    pts.push_back({sweep.evaluators[i](rec.x, rec.theta), sweep.tags[i]});
  }
  return pts;
}

void reframe(SweepResult& sweep, const HvFrame& frame) {
  sweep.frame = frame;
  sweep.hypervolume = frame_hypervolume(frame, sweep.finals);
  compute_curves(sweep);
}

SweepResult weight_sweep(const std::function<SweepProblem(const WeightPair&)>& factory,
                         const SolverConfig& config, const std::vector<WeightPair>& weights,
                         const SweepOptions& options) {
  SweepResult out;
  out.weights = weights;
  out.time_budget_s = config.stop.max_wall_time_s.value_or(0.0);
  out.evaluators.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w%02zu", i);
    out.tags.push_back(options.tag_prefix + buf);
  }

  std::vector<SolverConfig> configs(weights.size(), config);
  out.runs = run_grid(
      [&](std::size_t i) {
        SweepProblem sp = factory(weights[i]);
        out.evaluators[i] = std::move(sp.objectives);
        return std::move(sp.problem);
      },
      configs, options.parallel, options.jobs);

  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    if (!out.runs[i].ok()) continue;
    const auto& traj = *out.runs[i].trajectory;
    out.finals.push_back({out.evaluators[i](traj.final_x, traj.final_theta), out.tags[i]});
  }
  if (out.finals.empty()) return out;

  out.archive = normalize(
      ParetoArchive{.points = out.finals, .excluded = {}, .norm_factors = {}}, options.exclusions);
  out.frame = HvFrame{.factors = out.archive.norm_factors,
                      .reference = reference_point(out.archive.points, options.margin),
                      .exclusions = options.exclusions};
  out.hypervolume = hypervolume_2d(pareto_filter(out.archive.points), out.frame.reference);
  compute_curves(out);
  return out;
}

}  // namespace jolopt::moo
