#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "jante/geometry.hpp"
#include "jante/random.hpp"

namespace jante {

enum class Family {
  UniformCube,
  Gaussian,
  Bernoulli,
  Cauchy,
  Laplace,
  Exponential,
  Pareto,
  CantorLike,
  FiniteDiscrete,
  Mixture,
  ProductOfOneDim,
};

const char* to_string(Family family) noexcept;
std::optional<Family> family_from_string(const std::string& name);

struct DistributionSpec;

// Scalar families draw each of the `dim` coordinates independently.
struct UniformCubeParams { double lo = 0.0; double hi = 1.0; };
struct GaussianParams { double mean = 0.0; double sd = 1.0; };
struct BernoulliParams { double p = 0.5; };
struct CauchyParams { double location = 0.0; double scale = 1.0; };
struct LaplaceParams { double location = 0.0; double scale = 1.0; };
struct ExponentialParams { double rate = 1.0; };
struct ParetoParams { double alpha = 1.0; double scale = 1.0; };
struct CantorParams { int depth = 30; };
struct FiniteDiscreteParams {
  std::vector<Point> atoms;
  std::vector<double> weights;
};
struct MixtureParams {
  std::vector<double> weights;
  std::vector<DistributionSpec> components;
};
/// Coordinate c is drawn from factors[c]; every factor is one-dimensional.
struct ProductParams {
  std::vector<DistributionSpec> factors;
};

using DistributionParams =
    std::variant<UniformCubeParams, GaussianParams, BernoulliParams, CauchyParams, LaplaceParams,
                 ExponentialParams, ParetoParams, CantorParams, FiniteDiscreteParams,
                 MixtureParams, ProductParams>;

/// Declarative description of the resampling law.
struct DistributionSpec {
  std::size_t dim = 1;
  DistributionParams params;

  Family family() const noexcept { return static_cast<Family>(params.index()); }
};

/// Throws InvalidDistribution when parameters leave their valid ranges.
void validate(const DistributionSpec& spec);

/// Canonical encoding {"family": ..., "dim": ..., "params": {...}}.
nlohmann::json to_json(const DistributionSpec& spec);
/// Missing parameters take their defaults. Throws InvalidDistribution.
DistributionSpec distribution_from_json(const nlohmann::json& j);

/// Immutable sampler compiled from a validated spec.
class Sampler {
 public:
  explicit Sampler(DistributionSpec spec);

  std::size_t dim() const noexcept { return spec_.dim; }
  const DistributionSpec& spec() const noexcept { return spec_; }

  /// Writes one draw into `out` (size dim()).
  void draw(Rng& rng, std::span<double> out) const;
  Point draw(Rng& rng) const;

 private:
  DistributionSpec spec_;
};

/// Σ_{k=1..depth} b_k · 2/3^k with independent fair bits b_k.
double cantor_sample(int depth, Rng& rng);

struct Ball {
  Point center;
  double radius = 0.0;
};

struct RegularityCount {
  std::size_t probe = 0;  ///< index into the probe list
  double radius = 0.0;
  std::size_t inner_hits = 0;  ///< draws in B_{radius·delta}(x)
  std::size_t outer_hits = 0;  ///< draws in B_radius(x)
};

struct RegularityReport {
  Ball region;
  double delta = 0.0;
  double r_max = 0.0;
  double sigma_hat = 0.0;  ///< min conditional frequency over pairs with outer hits
  std::size_t n_samples = 0;
  std::vector<RegularityCount> conditional_counts;
  std::vector<RegularityCount> zero_hit_pairs;
};

/// Monte Carlo estimate of inf P(ζ ∈ B_{rδ}(x) | ζ ∈ B_r(x)) over the probe
/// points and radii. Balls are open. Throws InvalidArgument on bad inputs and
/// InsufficientMass when no pair receives a hit.
RegularityReport estimate_regularity(const Sampler& sampler, const Ball& region, double delta,
                                     std::span<const double> radii,
                                     std::span<const Point> probes, std::size_t n_samples,
                                     Rng& rng);

struct TailPair {
  double a = 0.0;
  double u = 0.0;
  std::size_t numerator_hits = 0;
  std::size_t denominator_hits = 0;
  std::optional<double> ratio;  ///< empty when indeterminate
};

struct TailReport {
  double r_plus = 0.0;
  double r_minus = 0.0;
  double c_hat = 0.0;
  std::vector<TailPair> grid;
  std::optional<std::pair<double, double>> worst_pair;
  std::size_t n_samples = 0;
};

/// Largest empirical ratio of consecutive tail-interval masses over the grid.
///
/// Right-tail entries (u > 0, a >= r_plus) compare (a+u, a+2u] against
/// (a, a+u]; left-tail entries (u < 0, a <= r_minus) compare (a+2u, a+u]
/// against (a+u, a]. An empty numerator gives ratio 0; a non-empty numerator
/// over an empty denominator is indeterminate. Throws InsufficientTailMass if
/// every entry is indeterminate.
TailReport estimate_tail_constant(const Sampler& sampler, double r_plus, double r_minus,
                                  std::span<const std::pair<double, double>> grid,
                                  std::size_t n_samples, Rng& rng);

nlohmann::json to_json(const RegularityReport& report);
nlohmann::json to_json(const TailReport& report);

}  // namespace jante
