#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "curvlab/classifier.hpp"

namespace curvlab {

/// Value and derivatives through order 5 of a function of t at one node.
using NodeJet = std::array<double, 6>;

/// Warped products dt^2 + e^{q(t)} h over an (n-1)-dimensional Einstein fiber with scalar
/// curvature k. eps and C only matter for the periodic construction.
struct WarpedParams {
  int n = 4;
  double k = 0.0;
  double eps = 0.0;
  double C = 0.0;
};

/// q''' + (n/2) q'q'' + (k/(n-1)) e^{-q} q' - (1/2)(2q'' + q'^2) f'.
/// Its vanishing is both the weighted harmonic curvature condition and the warped Y_f condition.
double hcf_ode_residual(const NodeJet& q, double fprime, int n, double k);
std::vector<double> hcf_ode_residual(std::span<const NodeJet> q, std::span<const double> fprime, int n, double k);

/// Integrated form q'' + (n/4) q'^2 - (k/(n-1)) e^{-q} - (1/2) int_{t_0}^{t} (2q'' + q'^2) f' ds on a
/// grid. The integral uses the endpoint-corrected trapezoid rule, so f must carry f''.
/// Along a solution the result is constant; its derivative is the ODE residual.
std::vector<double> integrated_lhs(std::span<const double> t, std::span<const NodeJet> q, std::span<const NodeJet> f,
                                   int n, double k);

/// q'' + (n/4) q'^2 - ((k - eps)/(n-1)) e^{-q} - (4/n) C.
double reduced_ode_residual(const NodeJet& q, const WarpedParams& p);

struct PhiOrbit {
  WarpedParams params;
  double amplitude = 0.0;
  double phi_star = 0.0;        // centre equilibrium
  double step = 0.0;            // final integration step
  int refinements = 0;          // step halvings performed
  double period = 0.0;
  double linear_period = 0.0;   // 2 pi / omega from the linearization at phi_star
  bool equilibrium = false;     // amplitude 0: constant solution, period not measured
  double energy_drift = 0.0;    // max |E - E_0| / |E_0| over one period
  double return_gap = 0.0;      // |(phi, phi')(T) - (phi, phi')(0)|
  double max_ode_residual = 0.0;  // phi'' - a phi^{1-4/n} - C phi at the start, for equilibria
};

/// RK4 orbit of phi'' - a phi^{1-4/n} = C phi, a = n(k-eps)/(4(n-1)), from phi(0) = phi_star +
/// amplitude, phi'(0) = 0. The step is halved until the period changes by less than 1e-8.
/// Throws std::invalid_argument unless k > eps > 0 and C < -2(k-eps)/(n-1), and
/// std::domain_error if phi reaches 0 or the orbit does not return within the step budget.
PhiOrbit solve_phi(const WarpedParams& p, double amplitude, double step = 1e-3);

/// phi and phi' at t_j = j T / nodes, j = 0..nodes, re-integrated with a step that divides T/nodes.
struct OrbitSamples {
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<double> dphi;
};
OrbitSamples sample_orbit(const PhiOrbit& orbit, int nodes);

/// q = (4/n) log phi with derivatives through order 5; phi''..phi^{(5)} come from Taylor recurrences
/// of the phi ODE, never from the fourth-order q equation. Throws std::domain_error if phi <= 0.
std::vector<NodeJet> q_jets_from_phi(const OrbitSamples& s, const WarpedParams& p);

/// f' = (2 eps/(n-1)) q' e^{-q} / (2q'' + q'^2) with derivatives, and f by corrected trapezoid
/// quadrature with f(t_0) = 0. f' carries derivatives through order 3, so f^{(5)} is NaN. Nodes
/// where every derivative of q is below 1e-12 get f' = 0. Otherwise throws std::domain_error, naming
/// the first offending node, if 2q'' + q'^2 >= 0 somewhere on the grid.
std::vector<NodeJet> recover_f(std::span<const double> t, std::span<const NodeJet> q, const WarpedParams& p);

/// Largest value of 2q'' + q'^2 on the grid and the node where it occurs.
struct DenominatorProfile {
  double max_value = 0.0;
  double at_t = 0.0;
  double bound = 0.0;  // (8/n)(C + 2(k - eps)/(n-1))
};
DenominatorProfile denominator_profile(std::span<const double> t, std::span<const NodeJet> q, const WarpedParams& p);

struct WarpedSolution {
  WarpedParams params;
  std::vector<double> t;
  std::vector<NodeJet> q;
  std::vector<NodeJet> f;
  std::optional<PhiOrbit> orbit;
  std::vector<double> phi;
  double max_ode_residual = 0.0;      // hcf_ode_residual over the grid
  double max_reduced_residual = 0.0;  // reduced_ode_residual over the grid (periodic case)
  double f_period_gap = 0.0;          // |f(T) - f(0)| in the periodic case
};

/// q = t^2, f = (n/2) log(1 + t^2), k = 0 on `nodes` equally spaced points of [lo, hi].
WarpedSolution gaussian_warped_solution(int n, int nodes = 101, double lo = -2.0, double hi = 2.0);

/// The full periodic pipeline: solve_phi, sample_orbit, q_jets_from_phi and recover_f.
WarpedSolution periodic_solution(const WarpedParams& p, double amplitude, int nodes = 64, double step = 1e-3);

/// dt^2 + e^{q(t)} h with f(t) attached. Evaluation is only defined at the grid nodes in t.
CatalogEntry assemble(const WarpedSolution& s, const MetricField& fiber);

/// Checks the fiber's scalar curvature against k (std::invalid_argument beyond `fiber_tol`) and
/// classifies the assembled geometry at every grid node, with fiber coordinates from seeded samples.
std::vector<MembershipReport> assemble_and_verify(const WarpedSolution& s, const MetricField& fiber,
                                                  const std::vector<ClassId>& classes = {ClassId::HCf},
                                                  double threshold = kDefaultThreshold, double fiber_tol = 1e-8);

nlohmann::json to_json(const PhiOrbit& o);
nlohmann::json to_json(const WarpedSolution& s);

}  // namespace curvlab
