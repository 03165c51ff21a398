#include "jante/core_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jante/error.hpp"

namespace jante {

KSubsets::KSubsets(std::size_t n, std::size_t k) : n_(n), indices_(k) {
  if (k == 0 || k > n) throw Error(ErrorCode::InvalidArgument, "subset size must be in [1, n]");
  for (std::size_t i = 0; i < k; ++i) indices_[i] = i;
}

bool KSubsets::next() noexcept {
  const std::size_t k = indices_.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (indices_[i] < n_ - k + i) {
      ++indices_[i];
      for (std::size_t j = i + 1; j < k; ++j) indices_[j] = indices_[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::uint64_t binomial(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

std::vector<std::vector<std::size_t>> enumerate_removals(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  KSubsets cursor(n, k);
  do {
    const auto cur = cursor.current();
    out.emplace_back(cur.begin(), cur.end());
  } while (cursor.next());
  return out;
}

double moments_energy(std::span<const double> sum_vec, double sum_sq, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "moments_energy needs m >= 1");
  const double g = sum_sq - squared_norm(sum_vec) / static_cast<double>(m);
  if (g < 0.0) {
    if (g < -1e-9) throw Error(ErrorCode::InconsistentMoments, "sum_sq below ||sum||^2/m");
    return 0.0;
  }
  return g;
}

namespace {

// Tracks the running minimum and draws uniformly among exact ties in one pass.
class TieReservoir {
 public:
  TieReservoir(Rng& rng, double rel_tol) : rng_(rng), rel_tol_(rel_tol) {}

  /// Returns true when the candidate becomes the current choice.
  bool offer(double value) {
    if (count_ == 0) return take(value);
    const double band = rel_tol_ * std::abs(best_);
    if (value < best_ - band) return take(value);
    if (value <= best_ + band) {
      ++count_;
      return rng_.below(count_) == 0;
    }
    return false;
  }

  std::size_t count() const noexcept { return count_; }

 private:
  bool take(double value) {
    best_ = value;
    count_ = 1;
    return true;
  }

  Rng& rng_;
  double rel_tol_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t count_ = 0;
};

std::vector<std::size_t> complement(std::span<const std::size_t> removed, std::size_t n) {
  std::vector<std::size_t> kept;
  kept.reserve(n - removed.size());
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (r < removed.size() && removed[r] == i) {
      ++r;
    } else {
      kept.push_back(i);
    }
  }
  return kept;
}

// Per-coordinate median of the configuration. Inside any majority subset's
// coordinate range, so kept-subset moments taken relative to it stay small
// even when the pool contains far-away samples.
std::vector<double> median_point(const PointConfiguration& cfg) {
  const std::size_t n = cfg.size();
  std::vector<double> column(n);
  std::vector<double> med(cfg.dim());
  for (std::size_t c = 0; c < cfg.dim(); ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = cfg.point(i)[c];
    auto mid = column.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(column.begin(), mid, column.end());
    med[c] = *mid;
  }
  return med;
}

}  // namespace

CoreSelection select_core(const PointConfiguration& cfg, std::size_t k, Rng& rng,
                          const SelectOptions& options) {
  const std::size_t n = cfg.size();
  const std::size_t d = cfg.dim();
  if (k < 1 || n < 3 || k > n - 2) {
    throw Error(ErrorCode::InvalidK, "K must satisfy 1 <= K <= N-2");
  }
  const std::size_t m = n - k;

  const auto shift = median_point(cfg);
  std::vector<double> centered(n * d);
  std::vector<double> sq(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = cfg.point(i);
    for (std::size_t c = 0; c < d; ++c) {
      const double v = p[c] - shift[c];
      centered[i * d + c] = v;
      sq[i] += v * v;
    }
  }

  TieReservoir reservoir(rng, options.tie_rel_tol);
  std::vector<std::size_t> best_removed;
  std::vector<double> sum(d);
  KSubsets cursor(n, k);
  do {
    const auto removed = cursor.current();
    std::fill(sum.begin(), sum.end(), 0.0);
    double sum_sq = 0.0;
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (r < k && removed[r] == i) {
        ++r;
        continue;
      }
      const double* row = centered.data() + i * d;
      for (std::size_t c = 0; c < d; ++c) sum[c] += row[c];
      sum_sq += sq[i];
    }
    const double g = moments_energy(sum, sum_sq, m);
    if (reservoir.offer(g)) best_removed.assign(removed.begin(), removed.end());
  } while (cursor.next());

  CoreSelection out;
  out.kept = complement(best_removed, n);
  out.removed = std::move(best_removed);
  out.core_energy = energy(cfg.subset(out.kept));
  out.tie_count = reservoir.count();
  return out;
}

CoreSelection furthest_point_core(const PointConfiguration& cfg, Rng& rng) {
  const std::size_t n = cfg.size();
  if (n < 3) throw Error(ErrorCode::InvalidK, "furthest_point_core needs N >= 3");
  const Point mu = barycenter(cfg);

  // Maximizing distance is minimizing its negation; reuse the reservoir.
  TieReservoir reservoir(rng, 0.0);
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (reservoir.offer(-squared_distance(cfg.point(i), mu))) chosen = i;
  }

  CoreSelection out;
  out.removed = {chosen};
  out.kept = complement(out.removed, n);
  out.core_energy = energy(cfg.subset(out.kept));
  out.tie_count = reservoir.count();
  return out;
}

}  // namespace jante
