#include "nlslab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlslab/rootfind.hpp"

namespace nlslab {

namespace {

double sq(double x) { return x * x; }

}  // namespace

double mass(const Field& u) {
    const auto& g = *u.grid;
    double m = 0;
    for (std::size_t j = 0; j < u.values.size(); ++j) m += g.quad_weights[j] * sq(u.values[j]);
    return m;
}

double mass(const ComplexField& u) {
    const auto& g = *u.grid;
    double m = 0;
    for (std::size_t j = 0; j < u.values.size(); ++j) m += g.quad_weights[j] * std::norm(u.values[j]);
    return m;
}

double grad_norm_sq(const Field& u) {
    const auto& g = *u.grid;
    const std::size_t n = u.values.size();
    double k = 0;
    for (std::size_t f = 1; f < n; ++f) k += g.face_coeff[f] * sq(u.values[f] - u.values[f - 1]);
    k += g.face_coeff[n] * sq(u.values[n - 1]);
    return k;
}

double grad_norm_sq(const ComplexField& u) {
    const auto& g = *u.grid;
    const std::size_t n = u.values.size();
    double k = 0;
    for (std::size_t f = 1; f < n; ++f) k += g.face_coeff[f] * std::norm(u.values[f] - u.values[f - 1]);
    k += g.face_coeff[n] * std::norm(u.values[n - 1]);
    return k;
}

double weighted_power_integral(const Field& u, double s) {
    const auto& g = *u.grid;
    double t = 0;
    for (std::size_t j = 0; j < u.values.size(); ++j)
        t += g.singular_weights[j] * std::pow(std::abs(u.values[j]), s);
    return t;
}

namespace {

double weighted_power_integral(const ComplexField& u, double s) {
    const auto& g = *u.grid;
    double t = 0;
    for (std::size_t j = 0; j < u.values.size(); ++j)
        t += g.singular_weights[j] * std::pow(std::abs(u.values[j]), s);
    return t;
}

template <typename FieldT>
EnergyBreakdown energy_impl(const FieldT& u, const ProblemParams& params) {
    EnergyBreakdown e;
    e.kinetic = 0.5 * grad_norm_sq(u);
    e.term_q = weighted_power_integral(u, params.q);
    e.term_p = weighted_power_integral(u, params.p);
    e.total = e.kinetic - params.mu / params.q * e.term_q - e.term_p / params.p;
    return e;
}

}  // namespace

EnergyBreakdown energy(const Field& u, const ProblemParams& params) { return energy_impl(u, params); }
EnergyBreakdown energy(const ComplexField& u, const ProblemParams& params) { return energy_impl(u, params); }

double fiber_energy_breakdown(const EnergyBreakdown& e, double t, const ProblemParams& params) {
    if (!(t > 0)) throw std::invalid_argument("fiber scale t must be positive");
    const double aq = 0.5 * params.dim * (params.q - 2.0) + params.b;
    const double ap = 0.5 * params.dim * (params.p - 2.0) + params.b;
    return t * t * e.kinetic - params.mu * std::pow(t, aq) / params.q * e.term_q -
           std::pow(t, ap) / params.p * e.term_p;
}

double fiber_denergy(const EnergyBreakdown& e, double t, const ProblemParams& params) {
    const double aq = 0.5 * params.dim * (params.q - 2.0) + params.b;
    const double ap = 0.5 * params.dim * (params.p - 2.0) + params.b;
    return 2.0 * t * e.kinetic - params.mu * aq * std::pow(t, aq - 1.0) / params.q * e.term_q -
           ap * std::pow(t, ap - 1.0) / params.p * e.term_p;
}

double fiber_d2energy(const EnergyBreakdown& e, double t, const ProblemParams& params) {
    const double aq = 0.5 * params.dim * (params.q - 2.0) + params.b;
    const double ap = 0.5 * params.dim * (params.p - 2.0) + params.b;
    return 2.0 * e.kinetic -
           params.mu * aq * (aq - 1.0) * std::pow(t, aq - 2.0) / params.q * e.term_q -
           ap * (ap - 1.0) * std::pow(t, ap - 2.0) / params.p * e.term_p;
}

double fiber_energy(const Field& u, double t, const ProblemParams& params) {
    return fiber_energy_breakdown(energy(u, params), t, params);
}

double pohozaev_Q(const Field& u, const ProblemParams& params) {
    return fiber_denergy(energy(u, params), 1.0, params);
}

double pohozaev_Q(const ComplexField& u, const ProblemParams& params) {
    return fiber_denergy(energy(u, params), 1.0, params);
}

double psi_second_variation(const Field& u, const ProblemParams& params) {
    return fiber_d2energy(energy(u, params), 1.0, params);
}

namespace {

// Monotone cubic Hermite interpolant (Fritsch-Carlson slopes) of samples on
// the grid nodes, extended evenly through r = 0 and by zero past r_max.
class RadialInterpolant {
  public:
    explicit RadialInterpolant(const Field& u) : g_(*u.grid) {
        const std::size_t n = u.values.size();
        // augmented abscissae: nodes plus (r_max, 0) so the tail closes
        x_.resize(n + 1);
        y_.resize(n + 1);
        for (std::size_t j = 0; j < n; ++j) { x_[j] = g_.nodes[j]; y_[j] = u.values[j]; }
        x_[n] = g_.r_max;
        y_[n] = 0.0;
        d_.assign(n + 1, 0.0);
        std::vector<double> s(n);  // secants
        for (std::size_t j = 0; j < n; ++j) s[j] = (y_[j + 1] - y_[j]) / (x_[j + 1] - x_[j]);
        const double h = g_.h;
        for (std::size_t j = 1; j < n; ++j) {
            double d;
            if (j >= 2 && j + 3 <= n) {
                // fourth-order centered slope on the uniform part
                d = (y_[j - 2] - 8.0 * y_[j - 1] + 8.0 * y_[j + 1] - y_[j + 2]) / (12.0 * h);
            } else {
                d = (s[j - 1] * s[j] > 0) ? 2.0 * s[j - 1] * s[j] / (s[j - 1] + s[j]) : 0.0;
            }
            // shape-preserving limiter
            if (s[j - 1] * s[j] <= 0) {
                d = 0.0;
            } else {
                const double bound = 3.0 * std::min(std::abs(s[j - 1]), std::abs(s[j]));
                if (d * s[j] < 0) d = 0.0;
                else if (std::abs(d) > bound) d = std::copysign(bound, s[j]);
            }
            d_[j] = d;
        }
        d_[n] = s[n - 1];
        // parabola through the first two nodes with zero slope at r = 0
        const double r0 = x_[0], r1 = x_[1];
        c0_ = (y_[1] - y_[0]) / (r1 * r1 - r0 * r0);
        a0_ = y_[0] - c0_ * r0 * r0;
        d_[0] = 2.0 * c0_ * r0;  // slope of the even extension at the first node
    }

    double operator()(double r) const {
        if (r >= g_.r_max) return 0.0;
        if (r < x_[0]) return a0_ + c0_ * r * r;
        // locate segment (uniform nodes, last segment is half width)
        std::size_t j = std::min<std::size_t>(static_cast<std::size_t>((r - x_[0]) / g_.h), x_.size() - 2);
        while (r < x_[j]) --j;
        while (r >= x_[j + 1]) ++j;
        const double hseg = x_[j + 1] - x_[j];
        const double s = (r - x_[j]) / hseg;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * y_[j] + h10 * hseg * d_[j] + h01 * y_[j + 1] + h11 * hseg * d_[j + 1];
    }

  private:
    const RadialGrid& g_;
    std::vector<double> x_, y_, d_;
    double a0_ = 0, c0_ = 0;
};

}  // namespace

Field resample_to_grid(const Field& u, const GridPtr& grid) {
    RadialInterpolant interp(u);
    Field out(grid);
    for (std::size_t j = 0; j < grid->size(); ++j) out.values[j] = interp(grid->nodes[j]);
    return out;
}

Field fiber_scale(const Field& u, double t) {
    if (!(t > 0)) throw std::invalid_argument("fiber scale t must be positive");
    const auto& g = *u.grid;
    RadialInterpolant interp(u);
    const double amp = std::pow(t, 0.5 * g.dim);
    Field out(u.grid);
    for (std::size_t j = 0; j < g.size(); ++j) out.values[j] = amp * interp(t * g.nodes[j]);
    // the continuum map preserves mass exactly; enforce it on the samples so
    // quadrature error does not leak into the mass constraint
    const double m_in = mass(u);
    const double m_out = mass(out);
    if (m_in > 0 && m_out > 0) {
        const double s = std::sqrt(m_in / m_out);
        for (auto& v : out.values) v *= s;
    }
    return out;
}

FiberScan fiber_scan(const Field& u, const ProblemParams& params, double t_lo, double t_hi,
                     int n_samples) {
    if (!(t_lo > 0 && t_hi > t_lo) || n_samples < 8)
        throw std::invalid_argument("fiber_scan: bad range");
    const EnergyBreakdown e = energy(u, params);
    FiberScan scan;
    scan.t_values.resize(n_samples);
    scan.energies.resize(n_samples);
    scan.derivative_signs.resize(n_samples);
    const double step = std::log(t_hi / t_lo) / (n_samples - 1);
    for (int i = 0; i < n_samples; ++i) {
        const double t = t_lo * std::exp(i * step);
        scan.t_values[i] = t;
        scan.energies[i] = fiber_energy_breakdown(e, t, params);
        const double d = fiber_denergy(e, t, params);
        scan.derivative_signs[i] = (d > 0) - (d < 0);
    }
    for (int i = 0; i + 1 < n_samples; ++i) {
        if (scan.derivative_signs[i] == 0 || scan.derivative_signs[i + 1] == 0) continue;
        if (scan.derivative_signs[i] * scan.derivative_signs[i + 1] < 0) {
            const double t_star = brent_root(
                [&](double t) { return fiber_denergy(e, t, params); }, scan.t_values[i],
                scan.t_values[i + 1]);
            const double d2 = fiber_d2energy(e, t_star, params);
            const double scale = std::abs(fiber_d2energy(e, t_star, params)) +
                                 std::abs(e.kinetic) + 1e-300;
            int morse = 0;
            if (std::abs(d2) > 1e-10 * scale) morse = (d2 > 0) ? 1 : -1;
            scan.critical_points.push_back(
                {t_star, fiber_energy_breakdown(e, t_star, params), morse});
        }
    }
    return scan;
}

Field normalize_to_mass(const Field& u, double c) {
    if (!(c > 0)) throw std::invalid_argument("target mass must be positive");
    const double m = mass(u);
    if (m <= 0) throw std::invalid_argument("cannot normalize the zero field");
    Field out = u;
    const double s = std::sqrt(c / m);
    for (auto& v : out.values) v *= s;
    return out;
}

double gn_quotient(const Field& u, const ProblemParams& params) {
    const double tp = weighted_power_integral(u, params.p);
    const double k = grad_norm_sq(u);
    const double m = mass(u);
    const double a = 0.5 * params.dim * (params.p - 2.0) + params.b;  // power of |grad u|_2^2 is a/2
    return tp / (std::pow(k, 0.5 * a) * std::pow(m, 0.5 * (params.p - a)));
}

double l2_norm(const Field& u) { return std::sqrt(mass(u)); }

double l2_distance(const Field& u, const Field& v) {
    if (u.grid != v.grid) throw std::invalid_argument("fields on different grids");
    const auto& g = *u.grid;
    double d = 0;
    for (std::size_t j = 0; j < u.values.size(); ++j)
        d += g.quad_weights[j] * sq(u.values[j] - v.values[j]);
    return std::sqrt(d);
}

RegimeLabel classify_regime(const ProblemParams& params) {
    params.validate();
    const double pc = params.critical_exponent();
    auto label = [&](double s) -> std::string {
        const double tol = 1e-12 * std::max(1.0, std::abs(pc));
        if (std::abs(s - pc) <= tol) return "critical";
        return s < pc ? "subcritical" : "supercritical";
    };
    RegimeLabel out;
    out.q_regime = label(params.q);
    out.p_regime = label(params.p);
    out.tag = "q " + out.q_regime + ", p " + out.p_regime + ", mu=" +
              (params.mu > 0 ? std::string("+1") : std::string("-1"));
    return out;
}

}  // namespace nlslab
