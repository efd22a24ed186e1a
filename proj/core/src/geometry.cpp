#include "jolopt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "jolopt/error.hpp"

namespace jolopt {

Halfspace::Halfspace(std::vector<Eigen::Index> index, std::vector<double> coef, double offset)
    : index_(std::move(index)), coef_(std::move(coef)), offset_(offset) {
  if (index_.size() != coef_.size()) {
    throw Error(ErrorCode::kRegionInvalid, "halfspace index/coefficient length mismatch");
  }
  if (!std::isfinite(offset_)) throw Error(ErrorCode::kRegionInvalid, "halfspace offset not finite");
  norm_sq_ = 0.0;
  for (double c : coef_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::kRegionInvalid, "halfspace normal not finite");
    norm_sq_ += c * c;
  }
  if (!(norm_sq_ > 0.0)) throw Error(ErrorCode::kRegionInvalid, "halfspace normal has zero norm");
  std::vector<Eigen::Index> sorted = index_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kRegionInvalid, "halfspace normal repeats a coordinate");
  }
}

Halfspace Halfspace::dense(const Vector& normal, double offset) {
  std::vector<Eigen::Index> index;
  std::vector<double> coef;
  for (Eigen::Index i = 0; i < normal.size(); ++i) {
    if (normal[i] != 0.0) {
      index.push_back(i);
      coef.push_back(normal[i]);
    }
  }
  return Halfspace(std::move(index), std::move(coef), offset);
}

double Halfspace::dot(const Vector& x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < index_.size(); ++j) s += coef_[j] * x[index_[j]];
  return s;
}

void Halfspace::axpy(double scale, Vector& x) const {
  for (std::size_t j = 0; j < index_.size(); ++j) x[index_[j]] += scale * coef_[j];
}

double Halfspace::violation(const Vector& x) const {
  return (dot(x) - offset_) / std::sqrt(norm_sq_);
}

Vector Halfspace::to_dense(Eigen::Index dim) const {
  Vector a = Vector::Zero(dim);
  for (std::size_t j = 0; j < index_.size(); ++j) a[index_[j]] = coef_[j];
  return a;
}

FeasibleRegion::FeasibleRegion(Vector lower, Vector upper, std::vector<Halfspace> halfspaces,
                               const ProjectionOptions& check)
    : lower_(std::move(lower)), upper_(std::move(upper)), halfspaces_(std::move(halfspaces)) {
  if (lower_.size() != upper_.size()) {
    throw Error(ErrorCode::kDimMismatch, "lower and upper bounds differ in length");
  }
  if (lower_.size() == 0) throw Error(ErrorCode::kRegionInvalid, "region dimension must be positive");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i] ||
        lower_[i] == std::numeric_limits<double>::infinity() ||
        upper_[i] == -std::numeric_limits<double>::infinity()) {
      std::ostringstream os;
      os << "invalid bounds at coordinate " << i << ": [" << lower_[i] << ", " << upper_[i] << "]";
      throw Error(ErrorCode::kRegionInvalid, os.str());
    }
  }
  for (const Halfspace& h : halfspaces_) {
    for (Eigen::Index idx : h.index()) {
      if (idx < 0 || idx >= lower_.size()) {
        throw Error(ErrorCode::kDimMismatch, "halfspace refers to a coordinate outside the region");
      }
    }
  }
  if (!halfspaces_.empty()) {
    try {
      (void)project(anchor(), check);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoConvergence) throw;
      throw Error(ErrorCode::kInfeasibleRegion,
                  "projection of the box midpoint did not converge; region is likely empty");
    }
  }
}

FeasibleRegion FeasibleRegion::box(Vector lower, Vector upper) {
  return FeasibleRegion(std::move(lower), std::move(upper));
}

FeasibleRegion FeasibleRegion::whole_space(Eigen::Index dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return FeasibleRegion(Vector::Constant(dim, -inf), Vector::Constant(dim, inf));
}

FeasibleRegion FeasibleRegion::nonnegative(Eigen::Index dim) {
  return FeasibleRegion(Vector::Zero(dim),
                        Vector::Constant(dim, std::numeric_limits<double>::infinity()));
}

Vector FeasibleRegion::anchor() const {
  Vector mid(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (std::isfinite(lower_[i]) && std::isfinite(upper_[i])) {
      mid[i] = 0.5 * (lower_[i] + upper_[i]);
    } else {
      mid[i] = std::clamp(0.0, lower_[i], upper_[i]);
    }
  }
  return mid;
}

void FeasibleRegion::check_dim(const Vector& point) const {
  if (point.size() != dim()) {
    std::ostringstream os;
    os << "point has dimension " << point.size() << ", region has " << dim();
    throw Error(ErrorCode::kDimMismatch, os.str());
  }
}

Vector FeasibleRegion::project_box(const Vector& point) const {
  check_dim(point);
  if (!halfspaces_.empty()) {
    throw Error(ErrorCode::kRegionInvalid, "project_box called on a region with halfspaces");
  }
  return point.cwiseMax(lower_).cwiseMin(upper_);
}

Vector FeasibleRegion::project(const Vector& point, double tol, int max_sweeps) const {
  check_dim(point);
  if (halfspaces_.empty()) return point.cwiseMax(lower_).cwiseMin(upper_);

  // Dykstra: the box carries a vector correction, each halfspace a scalar
  // multiple of its normal.
  Vector x = point;
  Vector box_corr = Vector::Zero(dim());
  std::vector<double> hs_corr(halfspaces_.size(), 0.0);
  Vector before(dim());
  Vector v(dim());
  const double stop_sq = 0.01 * tol * tol;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    before = x;
    double corr_change_sq = 0.0;

    v = x + box_corr;
    x = v.cwiseMax(lower_).cwiseMin(upper_);
    const Vector new_box_corr = v - x;
    corr_change_sq += (new_box_corr - box_corr).squaredNorm();
    box_corr = new_box_corr;

    for (std::size_t j = 0; j < halfspaces_.size(); ++j) {
      const Halfspace& h = halfspaces_[j];
      const double s_old = hs_corr[j];
      // v = x + s_old a; project v onto {a.v <= c}.
      const double av = h.dot(x) + s_old * h.norm_squared();
      const double s_new = std::max(0.0, (av - h.offset()) / h.norm_squared());
      h.axpy(s_old - s_new, x);
      const double ds = s_new - s_old;
      corr_change_sq += ds * ds * h.norm_squared();
      hs_corr[j] = s_new;
    }

    if (!x.allFinite()) break;
    const double move_sq = (x - before).squaredNorm();
    if (move_sq + corr_change_sq <= stop_sq && max_violation(x) <= tol) return x;
  }
  std::ostringstream os;
  os << "Dykstra projection did not reach tol " << tol << " within " << max_sweeps << " sweeps";
  throw Error(ErrorCode::kNoConvergence, os.str());
}

double FeasibleRegion::max_violation(const Vector& point) const {
  check_dim(point);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    worst = std::max({worst, lower_[i] - point[i], point[i] - upper_[i]});
  }
  for (const Halfspace& h : halfspaces_) worst = std::max(worst, h.violation(point));
  return worst;
}

bool FeasibleRegion::contains(const Vector& point, double tol) const {
  return max_violation(point) <= tol;
}

}  // namespace jolopt
