#include "jante/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "jante/error.hpp"

namespace jante {

namespace {

constexpr std::array<const char*, 11> kFamilyNames = {
    "UniformCube", "Gaussian", "Bernoulli",      "Cauchy",  "Laplace",        "Exponential",
    "Pareto",      "CantorLike", "FiniteDiscrete", "Mixture", "ProductOfOneDim",
};

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::InvalidDistribution, message);
}

void check_weights(const std::vector<double>& weights, std::size_t expected, const char* what) {
  if (weights.empty() || weights.size() != expected) {
    invalid(std::string(what) + ": weights must match the number of entries");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) invalid(std::string(what) + ": negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) invalid(std::string(what) + ": weights must sum to 1");
}

std::size_t pick_index(const std::vector<double>& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

double finite_param(const nlohmann::json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  const auto& v = params.at(key);
  if (!v.is_number()) invalid(std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

void reject_unknown(const nlohmann::json& params, std::initializer_list<const char*> known) {
  for (const auto& item : params.items()) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return item.key() == k; });
    if (!ok) invalid("unknown parameter '" + item.key() + "'");
  }
}

Point atom_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) invalid("atoms must be numbers or coordinate arrays");
  Point p;
  for (const auto& c : j) {
    if (!c.is_number()) invalid("atom coordinates must be numbers");
    p.push_back(c.get<double>());
  }
  return p;
}

std::vector<double> weights_from_json(const nlohmann::json& params) {
  if (!params.contains("weights") || !params.at("weights").is_array()) {
    invalid("missing 'weights' array");
  }
  std::vector<double> w;
  for (const auto& x : params.at("weights")) {
    if (!x.is_number()) invalid("weights must be numbers");
    w.push_back(x.get<double>());
  }
  return w;
}

std::vector<DistributionSpec> specs_from_json(const nlohmann::json& params, const char* key) {
  if (!params.contains(key) || !params.at(key).is_array()) {
    invalid(std::string("missing '") + key + "' array");
  }
  std::vector<DistributionSpec> out;
  for (const auto& c : params.at(key)) out.push_back(distribution_from_json(c));
  return out;
}

struct DrawVisitor {
  std::size_t dim;
  Rng& rng;
  std::span<double> out;

  template <typename F>
  void each(F&& f) {
    for (std::size_t c = 0; c < dim; ++c) out[c] = f();
  }

  void operator()(const UniformCubeParams& p) {
    each([&] { return p.lo + (p.hi - p.lo) * rng.uniform(); });
  }
  void operator()(const GaussianParams& p) {
    each([&] {
      const double radius = std::sqrt(-2.0 * std::log(rng.uniform_open()));
      return p.mean + p.sd * radius * std::cos(2.0 * std::numbers::pi * rng.uniform());
    });
  }
  void operator()(const BernoulliParams& p) {
    each([&] { return rng.uniform() < p.p ? 1.0 : 0.0; });
  }
  void operator()(const CauchyParams& p) {
    each([&] { return p.location + p.scale * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5)); });
  }
  void operator()(const LaplaceParams& p) {
    each([&] {
      const double u = rng.uniform_open() - 0.5;
      const double mag = -p.scale * std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? p.location - mag : p.location + mag;
    });
  }
  void operator()(const ExponentialParams& p) {
    each([&] { return -std::log1p(-rng.uniform()) / p.rate; });
  }
  void operator()(const ParetoParams& p) {
    each([&] { return p.scale * std::pow(1.0 - rng.uniform(), -1.0 / p.alpha); });
  }
  void operator()(const CantorParams& p) {
    each([&] { return cantor_sample(p.depth, rng); });
  }
  void operator()(const FiniteDiscreteParams& p) {
    const auto& atom = p.atoms[pick_index(p.weights, rng)];
    std::copy(atom.begin(), atom.end(), out.begin());
  }
  void operator()(const MixtureParams& p) {
    const auto& component = p.components[pick_index(p.weights, rng)];
    std::visit(DrawVisitor{dim, rng, out}, component.params);
  }
  void operator()(const ProductParams& p) {
    for (std::size_t c = 0; c < dim; ++c) {
      std::visit(DrawVisitor{1, rng, out.subspan(c, 1)}, p.factors[c].params);
    }
  }
};

}  // namespace

const char* to_string(Family family) noexcept {
  return kFamilyNames[static_cast<std::size_t>(family)];
}

std::optional<Family> family_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (name == kFamilyNames[i]) return static_cast<Family>(i);
  }
  return std::nullopt;
}

void validate(const DistributionSpec& spec) {
  if (spec.dim == 0) invalid("dim must be positive");
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) invalid(std::string(what) + " must be positive");
  };
  auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) invalid(std::string(what) + " must be finite");
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, UniformCubeParams>) {
          finite(p.lo, "lo");
          finite(p.hi, "hi");
          if (!(p.lo < p.hi)) invalid("UniformCube needs lo < hi");
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          finite(p.mean, "mean");
          positive(p.sd, "sd");
        } else if constexpr (std::is_same_v<T, BernoulliParams>) {
          if (!(p.p > 0.0 && p.p < 1.0)) invalid("Bernoulli needs 0 < p < 1");
        } else if constexpr (std::is_same_v<T, CauchyParams> || std::is_same_v<T, LaplaceParams>) {
          finite(p.location, "location");
          positive(p.scale, "scale");
        } else if constexpr (std::is_same_v<T, ExponentialParams>) {
          positive(p.rate, "rate");
        } else if constexpr (std::is_same_v<T, ParetoParams>) {
          positive(p.alpha, "alpha");
          positive(p.scale, "scale");
        } else if constexpr (std::is_same_v<T, CantorParams>) {
          if (p.depth < 1 || p.depth > 1000) invalid("CantorLike depth must be in [1, 1000]");
        } else if constexpr (std::is_same_v<T, FiniteDiscreteParams>) {
          if (p.atoms.empty()) invalid("FiniteDiscrete needs at least one atom");
          for (const auto& a : p.atoms) {
            if (a.size() != spec.dim) invalid("FiniteDiscrete atom has wrong dimension");
            for (double c : a) finite(c, "atom coordinate");
          }
          check_weights(p.weights, p.atoms.size(), "FiniteDiscrete");
        } else if constexpr (std::is_same_v<T, MixtureParams>) {
          if (p.components.empty()) invalid("Mixture needs at least one component");
          check_weights(p.weights, p.components.size(), "Mixture");
          for (const auto& c : p.components) {
            if (c.dim != spec.dim) invalid("Mixture components must share dim");
            validate(c);
          }
        } else if constexpr (std::is_same_v<T, ProductParams>) {
          if (p.factors.size() != spec.dim) invalid("ProductOfOneDim needs one factor per coordinate");
          for (const auto& f : p.factors) {
            if (f.dim != 1) invalid("ProductOfOneDim factors must be one-dimensional");
            validate(f);
          }
        }
      },
      spec.params);
}

nlohmann::json to_json(const DistributionSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, UniformCubeParams>) {
          params = {{"lo", p.lo}, {"hi", p.hi}};
        } else if constexpr (std::is_same_v<T, GaussianParams>) {
          params = {{"mean", p.mean}, {"sd", p.sd}};
        } else if constexpr (std::is_same_v<T, BernoulliParams>) {
          params = {{"p", p.p}};
        } else if constexpr (std::is_same_v<T, CauchyParams> || std::is_same_v<T, LaplaceParams>) {
          params = {{"location", p.location}, {"scale", p.scale}};
        } else if constexpr (std::is_same_v<T, ExponentialParams>) {
          params = {{"rate", p.rate}};
        } else if constexpr (std::is_same_v<T, ParetoParams>) {
          params = {{"alpha", p.alpha}, {"scale", p.scale}};
        } else if constexpr (std::is_same_v<T, CantorParams>) {
          params = {{"depth", p.depth}};
        } else if constexpr (std::is_same_v<T, FiniteDiscreteParams>) {
          params["atoms"] = p.atoms;
          params["weights"] = p.weights;
        } else if constexpr (std::is_same_v<T, MixtureParams>) {
          params["weights"] = p.weights;
          params["components"] = nlohmann::json::array();
          for (const auto& c : p.components) params["components"].push_back(to_json(c));
        } else if constexpr (std::is_same_v<T, ProductParams>) {
          params["factors"] = nlohmann::json::array();
          for (const auto& f : p.factors) params["factors"].push_back(to_json(f));
        }
      },
      spec.params);
  return {{"family", to_string(spec.family())}, {"dim", spec.dim}, {"params", params}};
}

DistributionSpec distribution_from_json(const nlohmann::json& j) {
  if (!j.is_object()) invalid("distribution must be a JSON object");
  if (!j.contains("family") || !j.at("family").is_string()) invalid("missing 'family'");
  const auto family = family_from_string(j.at("family").get<std::string>());
  if (!family) invalid("unknown family '" + j.at("family").get<std::string>() + "'");
  for (const auto& item : j.items()) {
    if (item.key() != "family" && item.key() != "dim" && item.key() != "params") {
      invalid("unknown distribution key '" + item.key() + "'");
    }
  }

  DistributionSpec spec;
  if (j.contains("dim")) {
    const auto& d = j.at("dim");
    if (!d.is_number_integer() || d.get<long long>() < 1) invalid("dim must be a positive integer");
    spec.dim = d.get<std::size_t>();
  }
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  if (!params.is_object()) invalid("params must be an object");

  switch (*family) {
    case Family::UniformCube:
      reject_unknown(params, {"lo", "hi"});
      spec.params = UniformCubeParams{finite_param(params, "lo", 0.0), finite_param(params, "hi", 1.0)};
      break;
    case Family::Gaussian:
      reject_unknown(params, {"mean", "sd"});
      spec.params = GaussianParams{finite_param(params, "mean", 0.0), finite_param(params, "sd", 1.0)};
      break;
    case Family::Bernoulli:
      reject_unknown(params, {"p"});
      spec.params = BernoulliParams{finite_param(params, "p", 0.5)};
      break;
    case Family::Cauchy:
      reject_unknown(params, {"location", "scale"});
      spec.params = CauchyParams{finite_param(params, "location", 0.0), finite_param(params, "scale", 1.0)};
      break;
    case Family::Laplace:
      reject_unknown(params, {"location", "scale"});
      spec.params = LaplaceParams{finite_param(params, "location", 0.0), finite_param(params, "scale", 1.0)};
      break;
    case Family::Exponential:
      reject_unknown(params, {"rate"});
      spec.params = ExponentialParams{finite_param(params, "rate", 1.0)};
      break;
    case Family::Pareto:
      reject_unknown(params, {"alpha", "scale"});
      spec.params = ParetoParams{finite_param(params, "alpha", 1.0), finite_param(params, "scale", 1.0)};
      break;
    case Family::CantorLike: {
      reject_unknown(params, {"depth"});
      CantorParams p;
      if (params.contains("depth")) {
        if (!params.at("depth").is_number_integer()) invalid("depth must be an integer");
        p.depth = params.at("depth").get<int>();
      }
      spec.params = p;
      break;
    }
    case Family::FiniteDiscrete: {
      reject_unknown(params, {"atoms", "weights"});
      FiniteDiscreteParams p;
      if (!params.contains("atoms") || !params.at("atoms").is_array()) invalid("missing 'atoms' array");
      for (const auto& a : params.at("atoms")) p.atoms.push_back(atom_from_json(a));
      p.weights = weights_from_json(params);
      spec.params = std::move(p);
      break;
    }
    case Family::Mixture: {
      reject_unknown(params, {"weights", "components"});
      MixtureParams p;
      p.weights = weights_from_json(params);
      p.components = specs_from_json(params, "components");
      spec.params = std::move(p);
      break;
    }
    case Family::ProductOfOneDim: {
      reject_unknown(params, {"factors"});
      ProductParams p;
      p.factors = specs_from_json(params, "factors");
      if (!j.contains("dim")) spec.dim = p.factors.size();
      spec.params = std::move(p);
      break;
    }
  }
  validate(spec);
  return spec;
}

Sampler::Sampler(DistributionSpec spec) : spec_(std::move(spec)) { validate(spec_); }

void Sampler::draw(Rng& rng, std::span<double> out) const {
  if (out.size() != spec_.dim) throw Error(ErrorCode::InvalidArgument, "output span has wrong size");
  std::visit(DrawVisitor{spec_.dim, rng, out}, spec_.params);
}

Point Sampler::draw(Rng& rng) const {
  Point p(spec_.dim);
  draw(rng, p);
  return p;
}

double cantor_sample(int depth, Rng& rng) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "cantor depth must be >= 1");
  // Up to depth 33 the scaled value Σ 2·b_k·3^{depth−k} is an integer below
  // 2^53, so the result is the correctly rounded quotient.
  if (depth <= 33) {
    const std::uint64_t bits = rng();
    std::uint64_t scaled = 0;
    std::uint64_t power = 1;
    for (int k = depth; k >= 1; --k) {
      scaled += 2 * ((bits >> (k - 1)) & 1U) * power;
      power *= 3;
    }
    return static_cast<double>(scaled) / static_cast<double>(power);
  }
  std::vector<std::uint64_t> words(static_cast<std::size_t>((depth + 63) / 64));
  for (auto& w : words) w = rng();
  double value = 0.0;
  for (int k = depth; k >= 1; --k) {
    const auto bit = (words[static_cast<std::size_t>((k - 1) / 64)] >> ((k - 1) % 64)) & 1U;
    value = (value + 2.0 * static_cast<double>(bit)) / 3.0;
  }
  return value;
}

RegularityReport estimate_regularity(const Sampler& sampler, const Ball& region, double delta,
                                     std::span<const double> radii,
                                     std::span<const Point> probes, std::size_t n_samples,
                                     Rng& rng) {
  const std::size_t d = sampler.dim();
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must be in (0,1)");
  if (n_samples < 1000) throw Error(ErrorCode::InvalidArgument, "need at least 1000 samples");
  if (radii.empty() || probes.empty()) throw Error(ErrorCode::InvalidArgument, "empty radii or probes");
  if (region.center.size() != d) throw Error(ErrorCode::InvalidArgument, "region has wrong dimension");
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radii must be positive");
  }
  for (const auto& x : probes) {
    if (x.size() != d) throw Error(ErrorCode::InvalidArgument, "probe has wrong dimension");
    if (distance(x, region.center) > region.radius) {
      throw Error(ErrorCode::InvalidArgument, "probe outside region");
    }
  }

  std::vector<double> draws(n_samples * d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    sampler.draw(rng, std::span<double>(draws).subspan(s * d, d));
  }

  RegularityReport report;
  report.region = region;
  report.delta = delta;
  report.r_max = *std::max_element(radii.begin(), radii.end());
  report.n_samples = n_samples;
  report.sigma_hat = 1.0;
  bool any = false;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    for (double r : radii) {
      RegularityCount count{pi, r, 0, 0};
      const double outer2 = r * r;
      const double inner2 = (r * delta) * (r * delta);
      for (std::size_t s = 0; s < n_samples; ++s) {
        const double dist2 = squared_distance(std::span<const double>(draws).subspan(s * d, d), probes[pi]);
        if (dist2 < outer2) {
          ++count.outer_hits;
          if (dist2 < inner2) ++count.inner_hits;
        }
      }
      if (count.outer_hits == 0) {
        report.zero_hit_pairs.push_back(count);
        continue;
      }
      any = true;
      report.sigma_hat = std::min(report.sigma_hat, static_cast<double>(count.inner_hits) /
                                                        static_cast<double>(count.outer_hits));
      report.conditional_counts.push_back(count);
    }
  }
  if (!any) throw Error(ErrorCode::InsufficientMass, "no probe ball received any sample");
  return report;
}

TailReport estimate_tail_constant(const Sampler& sampler, double r_plus, double r_minus,
                                  std::span<const std::pair<double, double>> grid,
                                  std::size_t n_samples, Rng& rng) {
  if (sampler.dim() != 1) throw Error(ErrorCode::InvalidArgument, "tail constant needs a 1-d law");
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "grid is empty");
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  for (const auto& [a, u] : grid) {
    const bool right = u > 0.0 && a >= r_plus;
    const bool left = u < 0.0 && a <= r_minus;
    if (!right && !left) throw Error(ErrorCode::InvalidArgument, "grid entry outside both tails");
  }

  std::vector<double> draws(n_samples);
  for (auto& x : draws) sampler.draw(rng, std::span<double>(&x, 1));
  std::sort(draws.begin(), draws.end());
  // Count of draws in (lo, hi].
  auto count_in = [&](double lo, double hi) {
    const auto first = std::upper_bound(draws.begin(), draws.end(), lo);
    const auto last = std::upper_bound(draws.begin(), draws.end(), hi);
    return static_cast<std::size_t>(last - first);
  };

  TailReport report;
  report.r_plus = r_plus;
  report.r_minus = r_minus;
  report.n_samples = n_samples;
  bool any = false;
  for (const auto& [a, u] : grid) {
    TailPair pair{a, u, 0, 0, std::nullopt};
    if (u > 0.0) {
      pair.numerator_hits = count_in(a + u, a + 2.0 * u);
      pair.denominator_hits = count_in(a, a + u);
    } else {
      pair.numerator_hits = count_in(a + 2.0 * u, a + u);
      pair.denominator_hits = count_in(a + u, a);
    }
    if (pair.numerator_hits == 0) {
      pair.ratio = 0.0;
    } else if (pair.denominator_hits > 0) {
      pair.ratio = static_cast<double>(pair.numerator_hits) / static_cast<double>(pair.denominator_hits);
    }
    if (pair.ratio) {
      if (!any || *pair.ratio > report.c_hat) {
        report.c_hat = *pair.ratio;
        report.worst_pair = std::make_pair(a, u);
      }
      any = true;
    }
    report.grid.push_back(pair);
  }
  if (!any) throw Error(ErrorCode::InsufficientTailMass, "every grid entry is indeterminate");
  return report;
}

namespace {

nlohmann::json count_json(const RegularityCount& c) {
  return {{"probe", c.probe}, {"radius", c.radius}, {"inner_hits", c.inner_hits},
          {"outer_hits", c.outer_hits}};
}

}  // namespace

nlohmann::json to_json(const RegularityReport& report) {
  nlohmann::json j;
  j["region"] = {{"center", report.region.center}, {"radius", report.region.radius}};
  j["delta"] = report.delta;
  j["r_max"] = report.r_max;
  j["sigma_hat"] = report.sigma_hat;
  j["n_samples"] = report.n_samples;
  j["conditional_counts"] = nlohmann::json::array();
  for (const auto& c : report.conditional_counts) j["conditional_counts"].push_back(count_json(c));
  j["zero_hit_pairs"] = nlohmann::json::array();
  for (const auto& c : report.zero_hit_pairs) j["zero_hit_pairs"].push_back(count_json(c));
  return j;
}

nlohmann::json to_json(const TailReport& report) {
  nlohmann::json j;
  j["R_plus"] = report.r_plus;
  j["R_minus"] = report.r_minus;
  j["C_hat"] = report.c_hat;
  j["n_samples"] = report.n_samples;
  j["worst_pair"] = report.worst_pair
                        ? nlohmann::json{report.worst_pair->first, report.worst_pair->second}
                        : nlohmann::json(nullptr);
  j["grid"] = nlohmann::json::array();
  for (const auto& p : report.grid) {
    j["grid"].push_back({{"a", p.a},
                         {"u", p.u},
                         {"numerator_hits", p.numerator_hits},
                         {"denominator_hits", p.denominator_hits},
                         {"ratio", p.ratio ? nlohmann::json(*p.ratio) : nlohmann::json(nullptr)}});
  }
  return j;
}

}  // namespace jante
