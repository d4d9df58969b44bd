#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/catalog.hpp"
#include "curvlab/classes.hpp"
#include "curvlab/potential_tensors.hpp"

namespace curvlab {

enum class Verdict { Member, NonMember, Inconclusive };
std::string_view verdict_name(Verdict v);

inline constexpr double kDefaultThreshold = 1e-6;
inline constexpr double kDefaultThresholdDepth3 = 1e-5;

struct ClassifyOptions {
  std::uint64_t seed = 7;
  int count = 32;
  std::optional<double> threshold;  // default depends on depth
  int depth = 1;                    // curvature depth; classes need >= 1
  double effective_threshold() const;
};

/// member: score <= thr; inconclusive: score <= 10 thr; otherwise non-member.
Verdict decide(double score, double threshold);

struct Formulation {
  std::string name;
  std::vector<double> residuals;  // one per sample point
  double max = 0.0;
  double mean = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

struct MembershipReport {
  std::string geometry;
  ClassId cls = ClassId::SFf;
  std::uint64_t seed = 0;
  int count = 0;
  int depth = 1;
  double threshold = kDefaultThreshold;
  std::vector<Point> points;
  std::vector<double> residuals;  // primary formulation
  double max = 0.0;
  double mean = 0.0;
  std::optional<double> lambda_estimate;
  std::optional<double> lambda_stddev;  // normalized by 1 + |lambda|
  Verdict verdict = Verdict::Inconclusive;
  std::vector<Formulation> formulations;  // the first one is primary
  /// Pairs of formulations where one says member and another non-member.
  std::vector<std::pair<std::string, std::string>> disagreements;
  bool consistent() const { return disagreements.empty(); }
};

/// All tensors a classification needs at one point.
struct PointData {
  CurvaturePack pack;
  FPack fpack;                 // potential, or f = 0 when the geometry has none
  FPack zero;                  // f = 0, for the classical classes
  std::optional<XPack> xpack;  // when the geometry has a vector field
};
PointData point_data(const CatalogEntry& geometry, const Point& p, int depth);

/// Per-point residual of every formulation of `cls`, primary first, with the per-point lambda
/// value for classes that involve one.
struct ClassResidual {
  std::vector<std::pair<std::string, double>> formulations;
  std::optional<double> lambda;
};
ClassResidual class_residual(ClassId cls, const PointData& data);

/// Throws std::invalid_argument if the class needs a potential or vector field the geometry
/// lacks, or if the dimension is unsupported for the class.
MembershipReport classify(const CatalogEntry& geometry, ClassId cls, const ClassifyOptions& opts = {});
std::vector<MembershipReport> classify_many(const CatalogEntry& geometry, const std::vector<ClassId>& classes,
                                            const ClassifyOptions& opts = {});
/// As classify_many at the given points; opts.seed and opts.count are ignored.
std::vector<MembershipReport> classify_at(const CatalogEntry& geometry, const std::vector<ClassId>& classes,
                                          const std::vector<Point>& points, const ClassifyOptions& opts = {});

/// Classes the geometry carries the data for (f-classes need a potential, X-classes a field).
std::vector<ClassId> applicable_classes(const CatalogEntry& geometry);

struct LatticeReport {
  std::string geometry;
  std::vector<MembershipReport> reports;
  std::vector<ClassId> members;
  std::vector<std::pair<ClassId, ClassId>> violations;
  /// Each f-class verdict against its classical counterpart when the potential is constant.
  std::vector<std::pair<ClassId, ClassId>> trivial_reduction_mismatches;
  bool potential_constant = false;
};
LatticeReport lattice_check(const CatalogEntry& geometry, const ClassifyOptions& opts = {});

struct WarpedStructureReport {
  Point point;
  double grad_norm = 0.0;
  double weyl_norm = 0.0;
  Eigen::VectorXd eigenvalues;      // Ric in a g-orthonormal frame, ascending
  double mu_normal = 0.0;           // Ric(nu, nu), nu = grad f / |grad f|
  double mu_tangent = 0.0;          // mean eigenvalue on the orthogonal complement
  double eigenvector_residual = 0.0;  // |Ric nu - mu_normal nu|
  double tangent_spread = 0.0;      // max - min eigenvalue on the complement
  double trace_relation = 0.0;      // |mu_tangent - (R - mu_normal)/(n-1)|
  bool degenerate = false;          // Ric proportional to g
  bool pattern_holds = false;
};
/// Throws std::domain_error at a critical point of f or when |W| exceeds the threshold.
WarpedStructureReport warped_structure_diagnostic(const CatalogEntry& geometry, const Point& p,
                                                  double threshold = kDefaultThreshold);

struct ConformalYfPoint {
  Point point;
  double rescaled_residual = 0.0;  // Y_f residual of e^{2u} g
  double pde_residual = 0.0;       // printed PDE, normalized
  bool vanish_together = false;
};
struct ConformalYfReport {
  std::vector<ConformalYfPoint> points;
  Verdict rescaled_verdict = Verdict::Inconclusive;
  double threshold = kDefaultThreshold;
};
ConformalYfReport yf_conformal_check(const MetricField& g, const ScalarPotential& u, const ScalarPotential& f,
                                     std::uint64_t seed, int count, double threshold = kDefaultThreshold);

nlohmann::json to_json(const MembershipReport& r);
nlohmann::json to_json(const LatticeReport& r);
nlohmann::json to_json(const WarpedStructureReport& r);
nlohmann::json to_json(const ConformalYfReport& r);

}  // namespace curvlab
