#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jante/geometry.hpp"
#include "jante/random.hpp"

namespace jante {

/// Result of choosing the (N−K)-point core of an N-point configuration.
struct CoreSelection {
  std::vector<std::size_t> kept;     ///< sorted, size N−K
  std::vector<std::size_t> removed;  ///< sorted, size K
  double core_energy = 0.0;          ///< energy of the kept points, recomputed from scratch
  std::size_t tie_count = 1;         ///< number of minimizing subsets
};

struct SelectOptions {
  /// Candidates within this relative distance of the running minimum count as
  /// ties. 0 means exact floating-point equality.
  double tie_rel_tol = 0.0;
};

/// Lexicographic cursor over the k-subsets of {0, ..., n−1}.
class KSubsets {
 public:
  /// Requires 1 <= k <= n.
  KSubsets(std::size_t n, std::size_t k);

  std::span<const std::size_t> current() const noexcept { return indices_; }
  /// Advances to the next subset; false once the last one has been visited.
  bool next() noexcept;

 private:
  std::size_t n_;
  std::vector<std::size_t> indices_;
};

std::uint64_t binomial(std::size_t n, std::size_t k) noexcept;

/// All k-subsets of {0, ..., n−1} in lexicographic order.
std::vector<std::vector<std::size_t>> enumerate_removals(std::size_t n, std::size_t k);

/// sum_sq − ||sum_vec||² / m, clamped to 0 inside a 1e−9 slack.
/// Throws InconsistentMoments when the result is below −1e−9.
double moments_energy(std::span<const double> sum_vec, double sum_sq, std::size_t m);

/// Exact minimum-energy core by enumerating all C(N, K) removals.
///
/// Removals are visited in lexicographic order and exact ties are resolved by
/// reservoir sampling: the j-th tying candidate (j >= 2) replaces the current
/// choice when rng.below(j) == 0. No randomness is consumed without ties.
/// Throws InvalidK unless 1 <= k <= N−2.
CoreSelection select_core(const PointConfiguration& cfg, std::size_t k, Rng& rng,
                          const SelectOptions& options = {});

/// K = 1 core: drop a point furthest from the barycenter, ties resolved the
/// same way as select_core. Requires N >= 3.
CoreSelection furthest_point_core(const PointConfiguration& cfg, Rng& rng);

}  // namespace jante
