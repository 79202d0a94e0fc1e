// Stationary solvers: fixed-frequency ground states (shooting plus damped
// Newton), normalized gradient flow under the mass constraint, dilation-map
// projection onto the zero set of the first fiber derivative, and the
// saddle-level minimization built on it.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlslab/functionals.hpp"

namespace nlslab {

struct SolveReport {
    Field state;
    EnergyBreakdown energy;
    double lambda = 0;
    double pohozaev_residual = 0;   // first fiber derivative at the state
    double equation_residual = 0;   // discrete L2 norm of the equation residual
    int iterations = 0;
    std::string level_tag;          // m(c) | M(c) | sigma(c) | sigma_-(c) | lambda-fixed | sigma_0
    bool success = false;
    std::string message;
};

struct SolverOptions {
    int n_nodes = 4096;
    double r_max = 12.0;
    double tol = 1e-9;          // projected-gradient stopping tolerance
    int max_iterations = 400000;
    double dt0 = 1e-3;          // initial flow step
    double dt_max = 50.0;
    double energy_floor = -1e6; // unbounded-below detection level
    bool newton_polish = true;
};

// Positive decreasing radial solution of
//   -Delta u + lambda u = coef_q |x|^{-b} u^{q-1} + |x|^{-b} u^{p-1}
// by shooting on u(0) with bisection on the overshoot/undershoot dichotomy,
// refined by damped Newton on the discrete equation. Set include_q_term =
// false for the single-power problem.
SolveReport solve_lambda_fixed(const ProblemParams& params, double lambda,
                               bool include_q_term = true, const SolverOptions& opts = {},
                               GridPtr grid = nullptr);

// Semi-implicit descent on E with projection to mass(u0) each step; detects
// unboundedness from below at opts.energy_floor.
SolveReport normalized_gradient_flow(const ProblemParams& params, const Field& u0, double tol,
                                     const SolverOptions& opts = {});

// Interior local minimizer in the gradient-norm ball |grad u|_2 < rho.
SolveReport local_min_solve(const ProblemParams& params, double c, const SolverOptions& opts = {},
                            GridPtr grid = nullptr);

// Rescales u along the dilation fiber to the requested zero of dE(u_t)/dt.
// branch: "lower" | "upper" | "unique". Throws std::runtime_error when the
// requested branch does not exist. When polish is set the root is refined
// against Q of the discretely rescaled samples (needed for tight residuals).
std::pair<double, Field> project_to_pohozaev(const Field& u, const ProblemParams& params,
                                             const std::string& branch, bool polish = true);

// Saddle-level state: alternating tangential descent on the mass sphere and
// fiber projection (upper/unique branch).
// A warm-start seed (normalized to mass c internally) replaces the default
// Gaussian initialization; useful when walking a curve point to point.
SolveReport mountain_pass_solve(const ProblemParams& params, double c,
                                const SolverOptions& opts = {}, GridPtr grid = nullptr,
                                const Field* seed = nullptr);

// Re-solves a converged mass-constrained state on a finer grid adapted to its
// length scale: r_max = r_scale / sqrt(lambda) (clamped), seeded by resampling
// the coarse state (with an exponential tail continuation where the new domain
// is larger) and polished by the bordered Newton method. Scaling the domain
// with 1/sqrt(lambda) keeps the relative resolution uniform across tight and
// wide states, which is what drives the fiber-identity residual down.
SolveReport refine_report(const SolveReport& coarse, const ProblemParams& params,
                          int n_nodes = 32768, double r_scale = 14.0);

std::vector<std::pair<double, double>> sigma_curve(const ProblemParams& params,
                                                   const std::vector<double>& c_values,
                                                   const SolverOptions& opts = {});

std::vector<std::pair<double, double>> m_curve(const ProblemParams& params,
                                               const std::vector<double>& c_values,
                                               const SolverOptions& opts = {});

// Gaussian bump exp(-r^2 / (2 w^2)) normalized to mass c.
Field gaussian_seed(const GridPtr& grid, double c, double width = 1.0);

// Multiplier estimate at u: (int rhs u - int |grad u|^2) / mass.
double multiplier_estimate(const Field& u, const ProblemParams& params);

// Discrete L2 norm of -Delta u + lambda u - mu w_b u^{q-1} - w_b u^{p-1}.
double equation_residual_norm(const Field& u, const ProblemParams& params, double lambda,
                              bool include_q_term = true, double coef_p = 1.0);

// Damped Newton refinement of the discrete fixed-frequency equation
//   -Delta u + lambda u = coef_q |x|^{-b}|u|^{q-2}u + coef_p |x|^{-b}|u|^{p-2}u
// in place; returns whether the residual tolerance was met.
bool newton_refine(Field& u, const ProblemParams& params, double lambda, double coef_q,
                   double coef_p, double tol, int max_iter = 100, int* iters = nullptr);

}  // namespace nlslab
