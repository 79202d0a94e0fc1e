// Closed-form threshold constants built from sharp weighted interpolation
// (Gagliardo-Nirenberg) constants, plus numerically located thresholds.
#pragma once

#include <map>
#include <optional>
#include <string>

#include "nlslab/params.hpp"
#include "nlslab/stationary.hpp"

namespace nlslab {

struct GnConstant {
    double value = 0;      // optimal constant C_{N,p,b}
    double q_norm_sq = 0;  // squared L2 norm of the single-power ground state
    double residual = 0;   // discrete equation residual of that ground state
};

struct ThresholdReport {
    std::optional<double> c1, c2, c3, c1_star, tilde_c2, hat_c2;
    std::string regime;
    std::map<std::string, std::string> provenance;
};

struct GnOptions {
    int n_nodes = 4096;
    double r_max = 12.0;
};

// Optimal constant of int |x|^{-b}|u|^p <= C |grad u|_2^{N(p-2)/2+b} |u|_2^{p-N(p-2)/2-b},
// computed from the ground state of -DQ + Q = |x|^{-b} Q^{p-1}. The exponent
// s selects which power the constant refers to (defaults to params.p).
GnConstant gn_constant(const ProblemParams& params, double power = 0, const GnOptions& opts = {});

// Mass thresholds; each checks its regime precondition and throws
// std::invalid_argument on mismatch.
double c1(const ProblemParams& params, const GnOptions& opts = {});
double c2(const ProblemParams& params, const GnOptions& opts = {});
double tilde_c2(const ProblemParams& params, const GnOptions& opts = {});
double hat_c2(const ProblemParams& params, const GnOptions& opts = {});
double c3(const ProblemParams& params, const GnOptions& opts = {});
double c1_star(const ProblemParams& params, const GnOptions& opts = {});

// Radius of the gradient-norm ball used by the local minimization: the
// maximizer of g(t) = t^{(2(2-b)-N(q-2))/2}/2 - (C_q/q) c^{...} - (C_p/p) c^{...} t^{N(p-q)/2}.
double vrho_radius(const ProblemParams& params, double c, const GnOptions& opts = {});

// Value of g at its maximizer (positive iff c < hat_c2).
double g_max_value(const ProblemParams& params, double c, const GnOptions& opts = {});

// All constants admitted by the regime of params.
ThresholdReport threshold_report(const ProblemParams& params, const GnOptions& opts = {});

// Bisection bracket of the mass where the global minimum becomes negative
// (mu = -1, both powers subcritical). Returns the located threshold.
double locate_mass_threshold(const ProblemParams& params, double c_lo, double c_hi,
                             const SolverOptions& solver_opts = {});

// Decay exponent of the zero-mass state and whether q sits at the resonance
// (2N-2-b)/(N-2) where a logarithmic correction appears.
std::pair<double, bool> decay_alpha(const ProblemParams& params);

}  // namespace nlslab
