// Mass, energy, dilation (fiber) map and the first and second fiber
// derivatives, evaluated as pure grid operations.
#pragma once

#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/params.hpp"

namespace nlslab {

struct EnergyBreakdown {
    double kinetic = 0;  // (1/2) int |grad u|^2
    double term_q = 0;   // int |x|^{-b} |u|^q
    double term_p = 0;   // int |x|^{-b} |u|^p
    double total = 0;    // kinetic - (mu/q) term_q - (1/p) term_p
};

struct FiberCriticalPoint {
    double t = 0;
    double energy = 0;
    int morse_sign = 0;  // sign of the second fiber derivative at t
};

struct FiberScan {
    std::vector<double> t_values;  // log-spaced scales
    std::vector<double> energies;
    std::vector<int> derivative_signs;
    std::vector<FiberCriticalPoint> critical_points;
};

double mass(const Field& u);
double mass(const ComplexField& u);

// int |grad u|^2 (twice the kinetic term).
double grad_norm_sq(const Field& u);
double grad_norm_sq(const ComplexField& u);

EnergyBreakdown energy(const Field& u, const ProblemParams& params);
EnergyBreakdown energy(const ComplexField& u, const ProblemParams& params);

// First derivative of t -> E(u_t) at t = 1 (vanishes on solutions).
double pohozaev_Q(const Field& u, const ProblemParams& params);
double pohozaev_Q(const ComplexField& u, const ProblemParams& params);

// Second derivative of t -> E(u_t) at t = 1; its sign is the Morse sign.
double psi_second_variation(const Field& u, const ProblemParams& params);

// Samples u onto another grid by monotone cubic interpolation; values beyond
// the source r_max are treated as zero.
Field resample_to_grid(const Field& u, const GridPtr& grid);

// u_t(x) = t^{N/2} u(t x), resampled on the same grid by monotone cubic
// interpolation; values beyond r_max are treated as zero.
Field fiber_scale(const Field& u, double t);

// Closed form of E(u_t) from one breakdown of u; no resampled field needed.
double fiber_energy(const Field& u, double t, const ProblemParams& params);
double fiber_energy_breakdown(const EnergyBreakdown& e, double t, const ProblemParams& params);

// First and second derivatives of the closed-form fiber energy in t.
double fiber_denergy(const EnergyBreakdown& e, double t, const ProblemParams& params);
double fiber_d2energy(const EnergyBreakdown& e, double t, const ProblemParams& params);

// Tabulates E(u_t) on a log-spaced range and locates critical points by
// bracketed root-finding on the derivative.
FiberScan fiber_scan(const Field& u, const ProblemParams& params,
                     double t_lo = 1e-3, double t_hi = 1e3, int n_samples = 400);

// Rescales amplitude so mass(u) == c.
Field normalize_to_mass(const Field& u, double c);

// Weighted Lebesgue norm int |x|^{-b} |u|^s for the GN quotient.
double weighted_power_integral(const Field& u, double s);

// GN quotient T_p(u) / (|grad u|_2^{N(p-2)/2+b} |u|_2^{p-N(p-2)/2-b}).
double gn_quotient(const Field& u, const ProblemParams& params);

// Discrete L2 norm and distance with the grid measure.
double l2_norm(const Field& u);
double l2_distance(const Field& u, const Field& v);

}  // namespace nlslab
