#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvlab/classes.hpp"
#include "curvlab/geometry.hpp"

namespace curvlab {

struct KnownScalars {
  std::optional<double> scalar_curvature;
  std::optional<double> lambda;
};

struct CatalogEntry {
  std::string name;
  MetricField metric;
  std::optional<ScalarPotential> potential;
  std::optional<VectorFieldSpec> vector_field;
  std::vector<ClassId> expected_memberships;
  KnownScalars known;
};

/// Names accepted by catalog_lookup.
const std::vector<std::string>& catalog_names();

/// Build a named example. `dim` <= 0 selects the entry's default dimension; `lambda` is used
/// by gaussian_shrinker only. Throws std::invalid_argument for unknown names or unsupported dims.
CatalogEntry catalog_lookup(const std::string& name, int dim = 0, double lambda = 1.0);

/// Every catalog entry at its default parameters plus the extra dimensions used in tests.
std::vector<CatalogEntry> catalog_all();

// Building blocks shared with the spec loader and the warped constructions.
MetricField flat_metric(const Chart& chart);
/// Round sphere of radius r in hyperspherical angles (theta_1 .. theta_{m-1}, phi).
MetricField sphere_metric(int m, double radius, double margin = 0.1);
/// Upper half-space model delta / x_m^2.
MetricField hyperbolic_metric(int m, double margin = 0.1);

}  // namespace curvlab
