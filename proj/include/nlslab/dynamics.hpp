// Time integration of i psi_t + Delta psi + mu |x|^{-b}|psi|^{q-2}psi
// + |x|^{-b}|psi|^{p-2}psi = 0 by symmetric Strang splitting: a half-step
// exact pointwise phase rotation by the local nonlinear potential, a full
// Crank-Nicolson step on the weak-form radial Laplacian (tridiagonal solve),
// and a second phase half-step at the updated modulus. Mass is conserved to
// solver precision (the phase factor is exactly unimodular and the linear
// solve unitary) and the composition is second order. The unbounded phase
// rotation is deliberate: when a focusing solution collapses below the grid
// scale the phase decoheres and the discrete gradient norm inflates through
// the blowup threshold, which is what the detector watches for.
#pragma once

#include <string>
#include <vector>

#include "nlslab/functionals.hpp"
#include "nlslab/stationary.hpp"

namespace nlslab {

struct SimTrace {
    std::vector<double> times;
    std::vector<double> mass_series;
    std::vector<double> energy_series;
    std::vector<double> grad_norm_series;  // |grad psi|_2
    std::vector<double> virial_series;
    std::vector<double> q_series;          // first fiber derivative along the run
    std::string outcome;                   // completed | blowup_detected | step_underflow
};

struct SimOptions {
    int sample_stride = 10;
    double blowup_factor = 1e3;   // halt when |grad psi| exceeds this times initial
    double dt_min = 1e-12;
    double localized_R = 0;       // 0: plain virial in the trace
};

// One Strang step (phase half-step, Crank-Nicolson Laplacian, phase
// half-step); exactly unitary in mass, second order in dt.
ComplexField step(const ComplexField& psi, double dt, const ProblemParams& params);

SimTrace simulate(const ComplexField& psi0, double T, double dt, const ProblemParams& params,
                  const SimOptions& opts = {});

// 2 Im int conj(psi) chi'(r) dpsi/dr w r^{N-1} dr with chi'(r) = r.
double virial(const ComplexField& psi);

// Localized variant with chi_R(r) = R^2 chi(r/R); chi quadratic on [0, R],
// constant past 2R, with a C^2 polynomial bridge keeping chi'' <= 1.
double virial_localized(const ComplexField& psi, double R);

// K_plus | K_minus | neither, from E(u) against gamma_c and the sign of Q(u).
std::string classify_K(const Field& u, const ProblemParams& params, double gamma_c);

struct StabilityReport {
    double max_deviation = 0;    // max over samples of the phase-minimized L2 distance
    double eps = 0;
    std::string outcome;
    SimTrace trace;
};
StabilityReport stability_experiment(const SolveReport& ground, double eps, double T,
                                     const ProblemParams& params, double dt = 1e-3,
                                     const SimOptions& opts = {});

// q_negative_throughout and virial_decreasing are evaluated over the sampled
// trace up to (and excluding) the detection event: past the gradient
// threshold the discrete state no longer approximates the PDE solution.
struct BlowupReport {
    std::string outcome;
    double t_halt = 0;
    bool q_negative_throughout = false;
    bool virial_decreasing = false;
    SimTrace trace;
};
BlowupReport blowup_experiment(const SolveReport& ground, double tau, double T,
                               const ProblemParams& params, double dt = 1e-3,
                               const SimOptions& opts = {});

struct StraussReport {
    double max_ratio = 0;  // max_r r^{(N-1)/2}|u| / (2 |u|_2^{1/2} |grad u|_2^{1/2})
    bool holds = false;
};
StraussReport strauss_check(const Field& u);

}  // namespace nlslab
