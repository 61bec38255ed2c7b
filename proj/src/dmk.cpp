#include "hyperot/dmk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "hyperot/errors.hpp"

namespace hyperot {
namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Gradients of the three hat functions on triangle t (constant per triangle).
std::array<Point2, 3> hat_gradients(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const auto& p = mesh.vertices();
  const double a2 = 2.0 * mesh.triangle_areas()[t];
  std::array<Point2, 3> g;
  for (int k = 0; k < 3; ++k) {
    const Point2& pj = p[tri[(k + 1) % 3]];
    const Point2& pk = p[tri[(k + 2) % 3]];
    g[k] = {(pj.y - pk.y) / a2, (pk.x - pj.x) / a2};
  }
  return g;
}

SpMat assemble_stiffness(const Mesh& mesh, std::span<const double> mu) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = hat_gradients(mesh, static_cast<int>(t));
    const double scale = mu[t] * mesh.triangle_areas()[t];
    const auto& tri = mesh.triangles()[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        entries.emplace_back(tri[a], tri[b], scale * (g[a].x * g[b].x + g[a].y * g[b].y));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  SpMat k(n, n);
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

// Lumped load f_i * w_i, shifted to lie in the range of the Neumann operator.
Eigen::VectorXd assemble_load(const Mesh& mesh, const ForcingField& f) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = f.values[i] * mesh.vertex_weights()[i];
  b.array() -= b.mean();
  return b;
}

void project_weighted_mean(const Mesh& mesh, Eigen::VectorXd& u) {
  const auto& w = mesh.vertex_weights();
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    num += u[i] * w[i];
    den += w[i];
  }
  u.array() -= num / den;
}

void check_inputs(const Mesh& mesh, const ConductivityField& mu, const ForcingField& f) {
  if (mu.mu.size() != mesh.num_triangles()) throw ConfigError("mu", "size does not match triangle count");
  if (f.values.size() != mesh.num_vertices()) throw ConfigError("forcing", "size does not match vertex count");
  for (double m : mu.mu) {
    if (!(m > 0.0)) throw ConfigError("mu", "conductivity must be strictly positive");
  }
  check_mass_balance(mesh, f);
}

PotentialField to_field(const Eigen::VectorXd& u) {
  return PotentialField{std::vector<double>(u.data(), u.data() + u.size())};
}

}  // namespace

void SolverConfig::validate() const {
  if (!(beta > 1.0 && beta < 2.0)) throw ConfigError("beta", "must lie in the open interval (1, 2)");
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (max_iter < 0) throw ConfigError("max_iter", "must be non-negative");
  if (!(tau > 0.0)) throw ConfigError("tau", "must be positive");
  if (!(mu_floor > 0.0)) throw ConfigError("mu_floor", "must be positive");
  if (!(linear_tol > 0.0)) throw ConfigError("linear_tol", "must be positive");
}

double forcing_mass(const Mesh& mesh, const ForcingField& f) {
  double mass = 0.0;
  for (std::size_t v = 0; v < f.values.size(); ++v) mass += f.values[v] * mesh.vertex_weights()[v];
  return mass;
}

void check_mass_balance(const Mesh& mesh, const ForcingField& f) {
  double variation = 0.0;
  for (std::size_t v = 0; v < f.values.size(); ++v) variation += std::abs(f.values[v]) * mesh.vertex_weights()[v];
  const double mass = forcing_mass(mesh, f);
  if (std::abs(mass) > 1e-12 * std::max(1.0, variation)) {
    throw ConfigError("forcing", "not mass balanced (net mass " + std::to_string(mass) + ")");
  }
}

PotentialField assemble_and_solve_potential(const Mesh& mesh, const ConductivityField& mu,
                                            const ForcingField& f, double linear_tol) {
  check_inputs(mesh, mu, f);
  const Eigen::VectorXd b = assemble_load(mesh, f);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return PotentialField{std::vector<double>(mesh.num_vertices(), 0.0)};

  const SpMat k = assemble_stiffness(mesh, mu.mu);
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(linear_tol);
  cg.setMaxIterations(20 * k.rows() + 1000);
  cg.compute(k);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(k.rows());
  double residual = 0.0;
  // The recursively updated CG residual can drift from the true one; restart
  // from the current iterate until the true residual meets the target.
  for (int attempt = 0; attempt < 4; ++attempt) {
    u = cg.solveWithGuess(b, u);
    residual = (k * u - b).norm() / bnorm;
    if (residual <= linear_tol) break;
  }
  if (residual > linear_tol) {
    throw SolverError("elliptic solve did not reach tolerance (relative residual " + std::to_string(residual) + ")",
                      -1, residual);
  }
  project_weighted_mean(mesh, u);
  return to_field(u);
}

PotentialField solve_potential_dense(const Mesh& mesh, const ConductivityField& mu, const ForcingField& f) {
  check_inputs(mesh, mu, f);
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  if (n > 500) throw ConfigError("mesh", "dense path limited to 500 vertices");

  // [K w; w^T 0] [u; lambda] = [b; 0] fixes the gauge sum w_i u_i = 0.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = Eigen::MatrixXd(assemble_stiffness(mesh, mu.mu));
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, n) = mesh.vertex_weights()[i];
    a(n, i) = mesh.vertex_weights()[i];
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = assemble_load(mesh, f);
  const Eigen::VectorXd sol = a.fullPivLu().solve(rhs);
  Eigen::VectorXd u = sol.head(n);
  project_weighted_mean(mesh, u);
  return to_field(u);
}

double relative_residual(const Mesh& mesh, const ConductivityField& mu, const ForcingField& f,
                         const PotentialField& u) {
  const Eigen::VectorXd b = assemble_load(mesh, f);
  const double bnorm = b.norm();
  const SpMat k = assemble_stiffness(mesh, mu.mu);
  const Eigen::Map<const Eigen::VectorXd> uv(u.u.data(), static_cast<Eigen::Index>(u.u.size()));
  const double r = (k * uv - b).norm();
  return bnorm == 0.0 ? r : r / bnorm;
}

std::vector<Point2> triangle_gradients(const Mesh& mesh, std::span<const double> u) {
  std::vector<Point2> grads(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = hat_gradients(mesh, static_cast<int>(t));
    const auto& tri = mesh.triangles()[t];
    Point2 acc;
    for (int k = 0; k < 3; ++k) {
      acc.x += u[tri[k]] * g[k].x;
      acc.y += u[tri[k]] * g[k].y;
    }
    grads[t] = acc;
  }
  return grads;
}

std::vector<double> compute_flux_magnitude(const Mesh& mesh, const ConductivityField& mu,
                                           const PotentialField& u) {
  const auto grads = triangle_gradients(mesh, u.u);
  std::vector<double> flux(grads.size());
  for (std::size_t t = 0; t < grads.size(); ++t) flux[t] = mu.mu[t] * std::hypot(grads[t].x, grads[t].y);
  return flux;
}

ConductivityField update_conductivity(const ConductivityField& mu, std::span<const double> flux_magnitude,
                                      double beta, double dt, double mu_floor) {
  ConductivityField next{std::vector<double>(mu.mu.size()), mu.time_index + 1};
  for (std::size_t t = 0; t < mu.mu.size(); ++t) {
    const double m = mu.mu[t];
    next.mu[t] = std::max(m + dt * (std::pow(flux_magnitude[t], beta) - m), mu_floor);
  }
  return next;
}

CostBreakdown lyapunov_cost(const Mesh& mesh, const ConductivityField& mu, const PotentialField& u,
                            double beta) {
  if (beta == 2.0) throw ConfigError("beta", "structural cost undefined at beta = 2");
  const auto grads = triangle_gradients(mesh, u.u);
  const double exponent = (2.0 - beta) / beta;
  CostBreakdown c;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.triangle_areas()[t];
    const double g2 = grads[t].x * grads[t].x + grads[t].y * grads[t].y;
    c.energy += a * mu.mu[t] * g2;
    c.structure += a * std::pow(mu.mu[t], exponent);
  }
  c.energy *= 0.5;
  c.structure *= 0.5 / (2.0 - beta);
  c.total = c.energy + c.structure;
  return c;
}

DmkRun run_dmk(const TransportProblem& problem, const SolverConfig& config) {
  config.validate();
  if (!problem.mesh) throw ConfigError("mesh", "problem has no mesh");
  if (!(problem.mu0 > 0.0)) throw ConfigError("mu0", "initial conductivity must be positive");
  const Mesh& mesh = *problem.mesh;

  auto solve = [&](const ConductivityField& mu) {
    try {
      return assemble_and_solve_potential(mesh, mu, problem.forcing, config.linear_tol);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at step " + std::to_string(mu.time_index), mu.time_index,
                        e.residual());
    }
  };

  DmkRun run;
  ConductivityField mu{std::vector<double>(mesh.num_triangles(), problem.mu0), 0};
  PotentialField u = solve(mu);
  CostBreakdown cost = lyapunov_cost(mesh, mu, u, config.beta);
  run.steps.push_back({mu, u, cost});

  for (int it = 0; it < config.max_iter; ++it) {
    const auto flux = compute_flux_magnitude(mesh, mu, u);
    ConductivityField next = update_conductivity(mu, flux, config.beta, config.dt, config.mu_floor);
    double change = 0.0;
    for (std::size_t t = 0; t < next.mu.size(); ++t) change = std::max(change, std::abs(next.mu[t] - mu.mu[t]));
    mu = std::move(next);
    u = solve(mu);
    cost = lyapunov_cost(mesh, mu, u, config.beta);
    run.steps.push_back({mu, u, cost});
    run.last_update = change;
    if (change < config.tau) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace hyperot
