#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hyperot/mesh.hpp"

namespace hyperot {

/// Per-vertex forcing f = f+ - f- (mass rate per unit area).
struct ForcingField {
  std::vector<double> values;
  std::vector<int> source_support;
  std::vector<int> sink_support;
};

/// Piecewise-constant conductivity on triangles at step `time_index`.
struct ConductivityField {
  std::vector<double> mu;
  int time_index = 0;
};

/// Per-vertex transport potential, gauge-fixed to zero weighted mean.
struct PotentialField {
  std::vector<double> u;
};

struct CostBreakdown {
  double total = 0.0;
  double energy = 0.0;
  double structure = 0.0;
};

struct SolverConfig {
  double beta = 1.5;
  double dt = 1.0;
  int max_iter = 300;
  double tau = 1e-12;
  double mu_floor = 1e-10;
  double linear_tol = 1e-10;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

struct TransportProblem {
  std::shared_ptr<const Mesh> mesh;
  ForcingField forcing;
  double mu0 = 1.0;
};

struct DmkStep {
  ConductivityField mu;
  PotentialField u;
  CostBreakdown cost;
};

struct DmkRun {
  std::vector<DmkStep> steps;  // steps[0] is the initial state
  bool converged = false;      // true when the tau test stopped the run
  double last_update = 0.0;    // max |mu_T - mu_{T-1}|
};

/// Sum of f(v) * w(v) with lumped vertex weights.
double forcing_mass(const Mesh& mesh, const ForcingField& f);

/// Throws ConfigError unless f is balanced to 1e-12 relative to its total variation.
void check_mass_balance(const Mesh& mesh, const ForcingField& f);

/// Preconditioned CG solve of the pure Neumann problem. Throws SolverError when
/// the residual target is not met within the iteration cap.
PotentialField assemble_and_solve_potential(const Mesh& mesh, const ConductivityField& mu,
                                            const ForcingField& f, double linear_tol);

/// Dense bordered-system LU for small meshes (<= 500 vertices). Reference path for tests.
PotentialField solve_potential_dense(const Mesh& mesh, const ConductivityField& mu, const ForcingField& f);

/// || K u - b || / || b || with b the gauge-projected load. 0 when b = 0.
double relative_residual(const Mesh& mesh, const ConductivityField& mu, const ForcingField& f,
                         const PotentialField& u);

/// Constant gradient of the linear interpolant of `u` on each triangle.
std::vector<Point2> triangle_gradients(const Mesh& mesh, std::span<const double> u);

/// mu_T * |grad u|_T per triangle.
std::vector<double> compute_flux_magnitude(const Mesh& mesh, const ConductivityField& mu,
                                           const PotentialField& u);

/// Explicit Euler step mu + dt * (flux^beta - mu), clamped below at mu_floor.
ConductivityField update_conductivity(const ConductivityField& mu, std::span<const double> flux_magnitude,
                                      double beta, double dt, double mu_floor);

/// Energy E = 1/2 sum a mu |grad u|^2 and structure M = 1/2 sum a mu^((2-beta)/beta) / (2-beta).
CostBreakdown lyapunov_cost(const Mesh& mesh, const ConductivityField& mu, const PotentialField& u,
                            double beta);

/// Integrates from mu0 until max |mu_t - mu_{t-1}| < tau or max_iter updates.
DmkRun run_dmk(const TransportProblem& problem, const SolverConfig& config);

}  // namespace hyperot
