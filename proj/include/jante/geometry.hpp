#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jante {

using Point = std::vector<double>;

/// Ordered list of n points in R^d stored row-major, with the first and
/// second moments computed at construction.
class PointConfiguration {
 public:
  /// `coords` holds n*dim values. Throws EmptyConfiguration when n == 0 and
  /// InvalidArgument on dim == 0, ragged input or non-finite coordinates.
  PointConfiguration(std::size_t dim, std::vector<double> coords);

  static PointConfiguration from_points(std::span<const Point> points);
  /// One-dimensional convenience constructor.
  static PointConfiguration from_scalars(std::span<const double> values);

  std::size_t size() const noexcept { return coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }
  std::vector<Point> points() const;

  /// Σ x_i.
  std::span<const double> moment_sum() const noexcept { return moment_sum_; }
  /// Σ ||x_i||².
  double moment_sq() const noexcept { return moment_sq_; }

  /// Points at `indices`, in the given order.
  PointConfiguration subset(std::span<const std::size_t> indices) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<double> moment_sum_;
  double moment_sq_ = 0.0;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double distance(std::span<const double> a, std::span<const double> b) noexcept;
double squared_norm(std::span<const double> a) noexcept;

Point barycenter(const PointConfiguration& cfg);

/// Σ ||x_i − μ||². Coordinates are taken relative to the first point before
/// averaging, so a configuration of identical points has energy exactly 0.
double energy(const PointConfiguration& cfg);

/// (1/n) Σ_i Σ_{j<i} ||x_i − x_j||². O(n²d); used as a cross-check.
double energy_pairwise(const PointConfiguration& cfg);

/// Maximum pairwise Euclidean distance.
double range(const PointConfiguration& cfg);

}  // namespace jante
