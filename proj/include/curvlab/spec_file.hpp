#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "curvlab/catalog.hpp"

namespace curvlab {

/// Malformed geometry spec. `path` locates the offending field, e.g. "metric.params.components[1][0]".
class SpecError : public std::invalid_argument {
 public:
  SpecError(const std::string& path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Geometry spec document:
///
///   {"name": str, "dim": int,
///    "metric": {"kind": K, "params": {...}},
///    "potential": {"kind": P, "params": {...}},        optional
///    "vector_field": {"kind": V, "params": {...}},     optional
///    "chart": {"ranges": [[lo, hi], ...], "margin": m}}  optional for kinds with a natural chart
///
/// Metric kinds:
///   catalog     {name, dim?, lambda?}; also supplies the catalog potential, field and expectations
///   flat        {}
///   sphere      {radius?}               hyperspherical angles
///   hyperbolic  {}                      upper half-space
///   expression  {components: n x n strings} or {diagonal: n strings}, variables x1..xn
///   conformal   {base: metric, u: string}            e^{2u} base
///   warped      {warping: string in x1, fiber: metric}   dx1^2 + F(x1) fiber
///   product     {factors: [metric, metric]}, each factor carrying "dim"
/// Potential kinds: expression {expr}, zero, catalog.
/// Vector field kinds: expression {components}, zero, gradient, catalog.
/// Unknown fields are rejected.
CatalogEntry load_geometry_spec(const nlohmann::json& spec);
CatalogEntry load_geometry_spec_file(const std::string& path);

/// Seeded random spec with a potential. The mix covers generic metrics (members of no class)
/// and families with known memberships: Gaussian solitons, flat metrics with linear potentials,
/// round spheres with constant potentials, sphere products with Gaussian potentials, and
/// Gaussian-warped flat metrics.
nlohmann::json random_geometry_spec(std::uint64_t seed);

/// Seeded generic expression metric with a generic potential (no known class memberships).
nlohmann::json random_expression_spec(std::uint64_t seed, int dim);

}  // namespace curvlab
