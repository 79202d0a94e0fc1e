// Problem parameters for the radial model
//   -Delta u + lambda u = mu |x|^{-b} |u|^{q-2} u + |x|^{-b} |u|^{p-2} u
// with an optional L2 mass constraint.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nlslab {

struct ProblemParams {
    int dim = 3;             // space dimension N >= 1
    double b = 0.5;          // singular weight exponent, 0 < b < min(2, N)
    double q = 2.5;          // lower power, 2 < q < p
    double p = 4.0;          // upper power, p <= 2(N-b)/(N-2) when N >= 3
    int mu = 1;              // sign of the lower-power term, +1 or -1
    double mass_target = 0;  // prescribed mass c > 0; 0 means "not set"

    // mass-critical power 2 + 2(2-b)/N
    double critical_exponent() const { return 2.0 + 2.0 * (2.0 - b) / dim; }

    // weighted Sobolev-critical power 2(N-b)/(N-2)^+
    double sobolev_exponent() const {
        if (dim <= 2) return std::numeric_limits<double>::infinity();
        return 2.0 * (dim - b) / (dim - 2.0);
    }

    bool has_mass_target() const { return mass_target > 0; }

    void validate() const {
        if (dim < 1) throw std::invalid_argument("dim must be >= 1");
        if (!(b > 0 && b < std::min(2.0, static_cast<double>(dim))))
            throw std::invalid_argument("b must satisfy 0 < b < min(2, N)");
        if (!(q > 2 && q < p))
            throw std::invalid_argument("powers must satisfy 2 < q < p");
        // the endpoint p = 2(N-b)/(N-2) is admitted: the functionals and the
        // shooting problem remain well defined there
        if (!(p <= sobolev_exponent()))
            throw std::invalid_argument("p must not exceed 2(N-b)/(N-2)");
        if (mu != 1 && mu != -1) throw std::invalid_argument("mu must be +1 or -1");
        if (mass_target < 0) throw std::invalid_argument("mass_target must be positive when set");
    }
};

struct RegimeLabel {
    std::string q_regime;  // subcritical | critical | supercritical
    std::string p_regime;
    std::string tag;       // compact human-readable case tag
};

// Classifies q and p against the mass-critical power.
RegimeLabel classify_regime(const ProblemParams& params);

}  // namespace nlslab
