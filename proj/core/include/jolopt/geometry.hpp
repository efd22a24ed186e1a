#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace jolopt {

using Vector = Eigen::VectorXd;

/// a.x <= offset, with the normal stored sparsely. Constraint rows in the
/// problems we build touch only a handful of coordinates.
class Halfspace {
 public:
  Halfspace() = default;
  Halfspace(std::vector<Eigen::Index> index, std::vector<double> coef, double offset);

  /// Keeps the nonzero entries of a dense normal.
  static Halfspace dense(const Vector& normal, double offset);

  const std::vector<Eigen::Index>& index() const noexcept { return index_; }
  const std::vector<double>& coef() const noexcept { return coef_; }
  double offset() const noexcept { return offset_; }
  double norm_squared() const noexcept { return norm_sq_; }

  double dot(const Vector& x) const;
  /// x += scale * a
  void axpy(double scale, Vector& x) const;
  /// Signed distance of x past the boundary; <= 0 when satisfied.
  double violation(const Vector& x) const;

  Vector to_dense(Eigen::Index dim) const;

 private:
  std::vector<Eigen::Index> index_;
  std::vector<double> coef_;
  double offset_ = 0.0;
  double norm_sq_ = 0.0;
};

struct ProjectionOptions {
  double tol = 1e-8;
  int max_sweeps = 10000;
};

/// Box bounds (entries may be +/-infinity) intersected with halfspaces.
/// Immutable after construction; projection is a pure function.
class FeasibleRegion {
 public:
  FeasibleRegion() = default;

  /// Validates bounds and normals and checks nonemptiness by projecting the
  /// box midpoint. Throws kRegionInvalid, kDimMismatch or kInfeasibleRegion.
  FeasibleRegion(Vector lower, Vector upper, std::vector<Halfspace> halfspaces = {},
                 const ProjectionOptions& check = {});

  static FeasibleRegion box(Vector lower, Vector upper);
  static FeasibleRegion whole_space(Eigen::Index dim);
  static FeasibleRegion nonnegative(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  const std::vector<Halfspace>& halfspaces() const noexcept { return halfspaces_; }

  /// Midpoint of finite bounds, clamp of zero on coordinates with an infinite side.
  Vector anchor() const;

  /// Componentwise clamp. Requires a box-only region.
  Vector project_box(const Vector& point) const;

  /// Euclidean projection. Box-only regions are clamped exactly; otherwise
  /// Dykstra's alternating projections over {box, halfspace_1, ...}.
  /// Throws kNoConvergence after max_sweeps.
  Vector project(const Vector& point, double tol, int max_sweeps) const;
  Vector project(const Vector& point, const ProjectionOptions& options = {}) const {
    return project(point, options.tol, options.max_sweeps);
  }

  /// Every bound and halfspace satisfied up to Euclidean distance tol.
  bool contains(const Vector& point, double tol) const;

  /// Largest bound or halfspace violation (distance units); 0 if feasible.
  double max_violation(const Vector& point) const;

 private:
  void check_dim(const Vector& point) const;

  Vector lower_;
  Vector upper_;
  std::vector<Halfspace> halfspaces_;
};

}  // namespace jolopt
