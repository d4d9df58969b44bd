#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/catalog.hpp"

namespace curvlab {

struct IdentityCheck {
  std::string name;
  double max_residual = 0.0;  // normalized
  double tolerance = 0.0;
  int evaluated = 0;          // points where the identity applies
  bool passed() const { return max_residual <= tolerance; }
};

struct IdentityReport {
  std::string geometry;
  int dim = 0;
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<IdentityCheck> checks;
  bool passed() const;
};

struct IdentityOptions {
  std::uint64_t seed = 7;
  int count = 32;
  double tolerance = 1e-6;         // depth <= 2 quantities
  double tolerance_depth3 = 1e-5;  // Bach divergence
};

/// Pointwise tensor identities on one geometry: Riemann symmetries and Bianchi identities,
/// Weyl traces, Cotton symmetries, traces and divergence, the two Cotton routes, Bach symmetry,
/// trace and divergence, the Kulkarni-Nomizu divergence formula, and the D tensor identities.
/// Checks that do not apply in the geometry's dimension are omitted.
IdentityReport run_identity_suite(const CatalogEntry& geometry, const IdentityOptions& opts = {});

nlohmann::json to_json(const IdentityReport& r);

}  // namespace curvlab
