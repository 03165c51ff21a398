#include "jante/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "jante/error.hpp"

namespace jante {

PointConfiguration::PointConfiguration(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (coords_.size() % dim_ != 0) {
    throw Error(ErrorCode::InvalidArgument, "coordinate count is not a multiple of dim");
  }
  if (coords_.empty()) throw Error(ErrorCode::EmptyConfiguration, "configuration has no points");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
  }
  moment_sum_.assign(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto p = point(i);
    for (std::size_t c = 0; c < dim_; ++c) {
      moment_sum_[c] += p[c];
      moment_sq_ += p[c] * p[c];
    }
  }
}

PointConfiguration PointConfiguration::from_points(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyConfiguration, "configuration has no points");
  const std::size_t dim = points.front().size();
  std::vector<double> coords;
  coords.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::InvalidArgument, "points differ in dimension");
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointConfiguration(dim, std::move(coords));
}

PointConfiguration PointConfiguration::from_scalars(std::span<const double> values) {
  return PointConfiguration(1, std::vector<double>(values.begin(), values.end()));
}

std::vector<Point> PointConfiguration::points() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto p = point(i);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

PointConfiguration PointConfiguration::subset(std::span<const std::size_t> indices) const {
  std::vector<double> coords;
  coords.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    if (i >= size()) throw Error(ErrorCode::InvalidArgument, "subset index out of range");
    const auto p = point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointConfiguration(dim_, std::move(coords));
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    s += diff * diff;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

double squared_norm(std::span<const double> a) noexcept {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

Point barycenter(const PointConfiguration& cfg) {
  const auto n = static_cast<double>(cfg.size());
  Point mu(cfg.moment_sum().begin(), cfg.moment_sum().end());
  for (double& v : mu) v /= n;
  return mu;
}

double energy(const PointConfiguration& cfg) {
  const std::size_t n = cfg.size();
  const std::size_t d = cfg.dim();
  const auto origin = cfg.point(0);
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const auto p = cfg.point(i);
    for (std::size_t c = 0; c < d; ++c) mean[c] += p[c] - origin[c];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = cfg.point(i);
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = (p[c] - origin[c]) - mean[c];
      g += dev * dev;
    }
  }
  return g;
}

double energy_pairwise(const PointConfiguration& cfg) {
  const std::size_t n = cfg.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) s += squared_distance(cfg.point(i), cfg.point(j));
  }
  return s / static_cast<double>(n);
}

double range(const PointConfiguration& cfg) {
  double best = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      best = std::max(best, squared_distance(cfg.point(i), cfg.point(j)));
    }
  }
  return std::sqrt(best);
}

}  // namespace jante
