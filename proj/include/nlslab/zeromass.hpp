// Zero-frequency limit equation -Delta u + |x|^{-b}u^{q-1} = |x|^{-b}u^{p-1}
// solved by radial shooting, with algebraic-decay tail diagnostics.
#pragma once

#include "nlslab/stationary.hpp"

namespace nlslab {

// slope comes from an unconstrained log-log regression (used by the decay-
// rate checks). The residual comparison pits the two asymptotic forms of the
// decay law against each other with their exponents pinned by theory, both
// predicting log u on the same window so the rms values compare directly:
//   pure power      log u = log C - alpha log r            (C free)
//   log-corrected   log u = log C - (N-2) log r + kappa log(log r + beta),
//                   kappa = (2-N)/(2-b)                    (C, beta free)
struct TailFit {
    double r_lo = 0, r_hi = 0;   // fit window
    double slope = 0;            // unconstrained fitted d log u / d log r
    double alpha_expected = 0;
    bool log_corrected = false;          // q equals the resonance exponent
    double fit_residual = 0;             // rms residual of the expected model
    double power_fit_residual = 0;       // rms residual of the pinned power law
    double corrected_fit_residual = 0;   // rms residual of the log-corrected law
    double log_beta = 0;                 // fitted shift inside the logarithm
};

struct ZeroMassOptions {
    int n_nodes = 16384;
    double r_max = 80.0;
};

// Integrates the radial ODE from the origin with a series start; returns the
// trajectory sampled on the grid (zero past the first crossing) plus whether
// the trajectory crossed zero and where it stopped being trustworthy. Energy
// terms and mass are accumulated by quadrature along the adaptive trajectory
// itself, so they stay accurate even when the core is narrower than the grid
// spacing (large u_origin).
struct ZeroMassShot {
    Field trajectory;
    bool crossed = false;
    double r_event = 0;
    double u_origin = 0;
    EnergyBreakdown energy;  // mu = -1 sign convention
    double l2_mass = 0;
};
ZeroMassShot shoot_zero_mass(const ProblemParams& params, double u_origin,
                             const ZeroMassOptions& opts = {}, GridPtr grid = nullptr);

// Bisection on u(0) between the undershoot and overshoot regimes; returns the
// trajectory at the bisected critical amplitude. Free-space object: no wall
// effects, valid up to r_event.
ZeroMassShot critical_shot(const ProblemParams& params, const ZeroMassOptions& opts = {},
                           GridPtr grid = nullptr);

// critical_shot followed by damped-Newton refinement of the discrete boundary
// value problem. Energy, mass, and the Pohozaev residual in the report come
// from the trajectory quadrature (mu = -1 convention); the equation residual
// is the discrete one of the returned state. When the Newton iteration leaves
// the ground-state basin (it can collapse to zero for slowly decaying tails)
// the raw trajectory is returned with success = false.
SolveReport ground_state_zero_mass(const ProblemParams& params, const ZeroMassOptions& opts = {},
                                   GridPtr grid = nullptr);

// Log-log tail fit on [r_lo, r_hi]; zero bounds select the default window
// [max(10, 0.2 r_max), 0.8 r_max]. Slowly decaying branches need explicit
// windows well inside the domain (wall contamination) and inside the radius
// where the bisected orbit stays on the connecting manifold.
TailFit fit_tail(const Field& u, const ProblemParams& params, double r_lo = 0, double r_hi = 0);

struct SaturationReport {
    double sigma0 = 0;
    double zero_mass_l2 = 0;          // mass of the zero-frequency state on the grid
    bool l2_membership = false;       // alpha > N/2
    std::vector<std::pair<double, double>> sigma_samples;
    double c_saturated = 0;           // smallest sampled c within 1% of sigma0, 0 if none
};
SaturationReport sigma_saturation_check(const ProblemParams& params,
                                        const std::vector<double>& c_values,
                                        const ZeroMassOptions& opts = {},
                                        const SolverOptions& solver_opts = {});

}  // namespace nlslab
