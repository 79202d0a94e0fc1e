// Bracketed scalar root-finding (Brent's method).
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace nlslab {

// Root of f in [a, b]; f(a) and f(b) must have opposite signs.
inline double brent_root(const std::function<double(double)>& f, double a, double b,
                         double xtol = 1e-14, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0) throw std::invalid_argument("brent_root: no sign change in bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;
        } else {
            double s = fb / fa, pp, qq;
            if (a == c) {
                pp = 2 * m * s;
                qq = 1 - s;
            } else {
                const double rr = fb / fc, t = fa / fc;
                pp = s * (2 * m * t * (t - rr) - (b - a) * (rr - 1));
                qq = (t - 1) * (rr - 1) * (s - 1);
            }
            if (pp > 0) qq = -qq; else pp = -pp;
            if (2 * pp < std::min(3 * m * qq - std::abs(tol * qq), std::abs(e * qq))) {
                e = d; d = pp / qq;
            } else {
                d = e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) { c = a; fc = fa; e = d = b - a; }
    }
    return b;
}

}  // namespace nlslab
