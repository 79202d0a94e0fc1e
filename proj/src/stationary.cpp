#include "nlslab/stationary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "nlslab/rootfind.hpp"
#include "nlslab/thresholds.hpp"
#include "nlslab/tridiag.hpp"

namespace nlslab {

namespace {

double sgn_pow(double u, double s) {  // |u|^{s-2} u
    if (u == 0) return 0;
    return std::copysign(std::pow(std::abs(u), s - 1.0), u);
}

// (S u)_j for the face-flux stiffness form, with u(r_max) = 0.
std::vector<double> apply_stiffness(const RadialGrid& g, const std::vector<double>& u) {
    const std::size_t n = u.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        double v = (g.face_coeff[j] + g.face_coeff[j + 1]) * u[j];
        if (j > 0) v -= g.face_coeff[j] * u[j - 1];
        if (j + 1 < n) v -= g.face_coeff[j + 1] * u[j + 1];
        out[j] = v;
    }
    return out;
}

// gradient of E: (S u)_j - coef_q s_j |u|^{q-2}u - coef_p s_j |u|^{p-2}u
std::vector<double> energy_gradient(const Field& u, const ProblemParams& params, double coef_q,
                                    double coef_p) {
    const auto& g = *u.grid;
    std::vector<double> out = apply_stiffness(g, u.values);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] -= g.singular_weights[j] *
                  (coef_q * sgn_pow(u.values[j], params.q) + coef_p * sgn_pow(u.values[j], params.p));
    return out;
}

double weighted_norm(const RadialGrid& g, const std::vector<double>& v) {
    double s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s += g.quad_weights[j] * v[j] * v[j];
    return std::sqrt(s);
}

struct Bands {
    std::vector<double> sub, diag, sup;
};

// Jacobian of the strong-form residual F_j = (Su)_j/w_j + lambda u_j - ...
Bands equation_jacobian(const Field& u, const ProblemParams& params, double lambda, double coef_q,
                        double coef_p) {
    const auto& g = *u.grid;
    const std::size_t n = u.values.size();
    Bands J{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double w = g.quad_weights[j];
        const double wb = g.singular_weights[j] / w;
        J.sub[j] = (j > 0) ? -g.face_coeff[j] / w : 0.0;
        J.sup[j] = (j + 1 < n) ? -g.face_coeff[j + 1] / w : 0.0;
        const double au = std::abs(u.values[j]);
        double dg = 0;
        if (au > 0)
            dg = coef_q * (params.q - 1.0) * std::pow(au, params.q - 2.0) +
                 coef_p * (params.p - 1.0) * std::pow(au, params.p - 2.0);
        J.diag[j] = (g.face_coeff[j] + g.face_coeff[j + 1]) / w + lambda - wb * dg;
    }
    return J;
}

std::vector<double> equation_residual_vec(const Field& u, const ProblemParams& params,
                                          double lambda, double coef_q, double coef_p) {
    const auto& g = *u.grid;
    std::vector<double> F = energy_gradient(u, params, coef_q, coef_p);
    for (std::size_t j = 0; j < F.size(); ++j) F[j] = F[j] / g.quad_weights[j] + lambda * u.values[j];
    return F;
}

// Damped Newton on the fixed-frequency discrete equation.
bool newton_lambda_fixed(Field& u, const ProblemParams& params, double lambda, double coef_q,
                         double coef_p, int max_iter, double tol, int* iters) {
    const auto& g = *u.grid;
    std::vector<double> F = equation_residual_vec(u, params, lambda, coef_q, coef_p);
    double fn = weighted_norm(g, F);
    for (int it = 0; it < max_iter; ++it) {
        if (iters) ++*iters;
        if (fn <= tol) return true;
        Bands J = equation_jacobian(u, params, lambda, coef_q, coef_p);
        std::vector<double> step = solve_tridiagonal(J.sub, J.diag, J.sup, F);
        double alpha = 1.0;
        for (int bt = 0; bt < 40; ++bt) {
            Field trial = u;
            for (std::size_t j = 0; j < trial.values.size(); ++j)
                trial.values[j] -= alpha * step[j];
            std::vector<double> Ft = equation_residual_vec(trial, params, lambda, coef_q, coef_p);
            const double fnt = weighted_norm(g, Ft);
            if (fnt < fn * (1.0 - 1e-4 * alpha) || fnt < tol) {
                u = trial;
                F = std::move(Ft);
                fn = fnt;
                break;
            }
            alpha *= 0.5;
            if (bt == 39) return false;
        }
    }
    return fn <= tol;
}

// Bordered Newton on the mass-constrained system (unknowns u and lambda).
bool newton_mass_constrained(Field& u, double& lambda, const ProblemParams& params, double c,
                             int max_iter, double tol, int* iters) {
    const auto& g = *u.grid;
    const double coef_q = params.mu, coef_p = 1.0;
    auto merit = [&](const Field& v, double lam) {
        std::vector<double> F = equation_residual_vec(v, params, lam, coef_q, coef_p);
        const double G = mass(v) - c;
        return std::hypot(weighted_norm(g, F), G);
    };
    double m0 = merit(u, lambda);
    for (int it = 0; it < max_iter; ++it) {
        if (iters) ++*iters;
        if (m0 <= tol) return true;
        std::vector<double> F = equation_residual_vec(u, params, lambda, coef_q, coef_p);
        const double G = mass(u) - c;
        Bands J = equation_jacobian(u, params, lambda, coef_q, coef_p);
        std::vector<double> x1 = solve_tridiagonal(J.sub, J.diag, J.sup, F);
        std::vector<double> x2 = solve_tridiagonal(J.sub, J.diag, J.sup, u.values);
        double a1 = 0, a2 = 0;
        for (std::size_t j = 0; j < u.values.size(); ++j) {
            a1 += 2.0 * g.quad_weights[j] * u.values[j] * x1[j];
            a2 += 2.0 * g.quad_weights[j] * u.values[j] * x2[j];
        }
        if (a2 == 0) return false;
        const double dlam = (G - a1) / a2;
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            Field trial = u;
            for (std::size_t j = 0; j < trial.values.size(); ++j)
                trial.values[j] -= alpha * (x1[j] + dlam * x2[j]);
            const double lam_t = lambda + alpha * dlam;
            const double mt = merit(trial, lam_t);
            if (mt < m0 * (1.0 - 1e-4 * alpha) || mt < tol) {
                u = trial;
                lambda = lam_t;
                m0 = mt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) return m0 <= tol;
    }
    return m0 <= tol;
}

SolveReport make_report(Field u, const ProblemParams& params, double lambda, int iters,
                        const std::string& tag, bool success, const std::string& msg,
                        double coef_q, double coef_p) {
    SolveReport rep;
    rep.energy = energy(u, params);
    rep.lambda = lambda;
    // fiber identity of the equation actually solved (coef_q may differ from
    // mu when the q-power term is disabled)
    const double aq = 0.5 * params.dim * (params.q - 2.0) + params.b;
    const double ap = 0.5 * params.dim * (params.p - 2.0) + params.b;
    rep.pohozaev_residual = 2.0 * rep.energy.kinetic - coef_q * aq / params.q * rep.energy.term_q -
                            coef_p * ap / params.p * rep.energy.term_p;
    rep.equation_residual =
        weighted_norm(*u.grid, equation_residual_vec(u, params, lambda, coef_q, coef_p));
    rep.state = std::move(u);
    rep.iterations = iters;
    rep.level_tag = tag;
    rep.success = success;
    rep.message = msg;
    return rep;
}

// Radial shooting for -u'' - (N-1)/r u' + lambda u = coef_q r^{-b}u^{q-1} + coef_p r^{-b}u^{p-1}.
struct ShootResult {
    bool crossed = false;   // hit u = 0 before r_end
    double r_event = 0;
};

struct ShootRhs {
    int N;
    double b, q, p, lambda, coef_q, coef_p;
    void operator()(const std::array<double, 2>& y, std::array<double, 2>& dy, double r) const {
        const double rb = std::pow(r, -b);
        dy[0] = y[1];
        dy[1] = -(N - 1) / r * y[1] + lambda * y[0] -
                rb * (coef_q * sgn_pow(y[0], q) + coef_p * sgn_pow(y[0], p));
    }
};

// Series start away from r = 0: u = u0 + lambda u0 r^2/(2N) - f(u0) r^{2-b}/((2-b)(N-b)).
std::array<double, 2> series_start(const ShootRhs& rhs, double u0, double r) {
    const double f0 = rhs.coef_q * sgn_pow(u0, rhs.q) + rhs.coef_p * sgn_pow(u0, rhs.p);
    const double cb = 1.0 / ((2.0 - rhs.b) * (rhs.N - rhs.b));
    std::array<double, 2> y;
    y[0] = u0 + rhs.lambda * u0 * r * r / (2.0 * rhs.N) - f0 * std::pow(r, 2.0 - rhs.b) * cb;
    y[1] = rhs.lambda * u0 * r / rhs.N - f0 * (2.0 - rhs.b) * std::pow(r, 1.0 - rhs.b) * cb;
    return y;
}

// Integrates from r_start, optionally sampling onto grid nodes; classifies the
// trajectory and reports where it stops being trustworthy.
ShootResult shoot(const ShootRhs& rhs, double u0, double r_start, double r_end,
                  const std::vector<double>* nodes = nullptr, std::vector<double>* samples = nullptr,
                  double* r_valid = nullptr) {
    namespace ode = boost::numeric::odeint;
    using state_t = std::array<double, 2>;
    auto stepper = ode::make_dense_output(1e-11, 1e-13, ode::runge_kutta_dopri5<state_t>());
    state_t y = series_start(rhs, u0, r_start);
    stepper.initialize(y, r_start, 1e-6);
    std::size_t node_idx = 0;
    ShootResult res;
    res.r_event = r_end;
    if (r_valid) *r_valid = r_end;
    auto sample_until = [&](double r_to, bool valid) {
        if (!nodes) return;
        while (node_idx < nodes->size() && (*nodes)[node_idx] <= r_to) {
            if ((*nodes)[node_idx] < r_start) {
                state_t ys = series_start(rhs, u0, (*nodes)[node_idx]);
                (*samples)[node_idx] = ys[0];
            } else if (valid) {
                state_t ys;
                stepper.calc_state((*nodes)[node_idx], ys);
                (*samples)[node_idx] = ys[0];
            } else {
                (*samples)[node_idx] = 0.0;
            }
            ++node_idx;
        }
    };
    const double grow_cap = 3.0 * std::abs(u0);
    while (stepper.current_time() < r_end) {
        stepper.do_step(rhs);
        const double r1 = stepper.current_time();
        const state_t& y1 = stepper.current_state();
        if (y1[0] <= 0.0) {
            // locate the crossing inside the last step
            double lo = stepper.previous_time(), hi = r1;
            for (int k = 0; k < 80 && hi - lo > 1e-14 * (1 + hi); ++k) {
                const double mid = 0.5 * (lo + hi);
                state_t ym;
                stepper.calc_state(mid, ym);
                (ym[0] <= 0.0 ? hi : lo) = mid;
            }
            sample_until(lo, true);
            res.crossed = true;
            res.r_event = lo;
            if (r_valid) *r_valid = lo;
            sample_until(r_end, false);
            return res;
        }
        if (y1[1] > 0.0 || y1[0] > grow_cap) {
            sample_until(stepper.previous_time(), true);
            res.crossed = false;
            res.r_event = r1;
            if (r_valid) *r_valid = stepper.previous_time();
            sample_until(r_end, false);
            return res;
        }
        sample_until(r1, true);
    }
    sample_until(r_end, true);
    return res;
}

}  // namespace

bool newton_refine(Field& u, const ProblemParams& params, double lambda, double coef_q,
                   double coef_p, double tol, int max_iter, int* iters) {
    return newton_lambda_fixed(u, params, lambda, coef_q, coef_p, max_iter, tol, iters);
}

double multiplier_estimate(const Field& u, const ProblemParams& params) {
    const EnergyBreakdown e = energy(u, params);
    return (params.mu * e.term_q + e.term_p - 2.0 * e.kinetic) / mass(u);
}

double equation_residual_norm(const Field& u, const ProblemParams& params, double lambda,
                              bool include_q_term, double coef_p) {
    const double coef_q = include_q_term ? static_cast<double>(params.mu) : 0.0;
    return weighted_norm(*u.grid, equation_residual_vec(u, params, lambda, coef_q, coef_p));
}

Field gaussian_seed(const GridPtr& grid, double c, double width) {
    Field u(grid);
    for (std::size_t j = 0; j < grid->size(); ++j)
        u.values[j] = std::exp(-grid->nodes[j] * grid->nodes[j] / (2.0 * width * width));
    return normalize_to_mass(u, c);
}

SolveReport solve_lambda_fixed(const ProblemParams& params, double lambda, bool include_q_term,
                               const SolverOptions& opts, GridPtr grid) {
    params.validate();
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (!grid) grid = build_grid(params, opts.n_nodes, opts.r_max);
    const double coef_q = include_q_term ? static_cast<double>(params.mu) : 0.0;
    const double coef_p = 1.0;
    ShootRhs rhs{params.dim, params.b, params.q, params.p, lambda, coef_q, coef_p};
    const double r_start = std::min(1e-3, 0.1 * grid->h);
    const double r_end = grid->r_max;

    // bracket the critical height: undershoot (turns up) below, overshoot above
    double hi = 1.0;
    int guard = 0;
    while (!shoot(rhs, hi, r_start, r_end).crossed) {
        hi *= 2.0;
        if (++guard > 40) throw std::runtime_error("shooting bracket not found (no overshoot)");
    }
    double lo = 0.5 * hi;
    guard = 0;
    while (shoot(rhs, lo, r_start, r_end).crossed) {
        lo *= 0.5;
        if (++guard > 80) throw std::runtime_error("shooting bracket not found (no undershoot)");
    }
    int iters = 0;
    while ((hi - lo) > 1e-14 * hi) {
        const double mid = 0.5 * (lo + hi);
        (shoot(rhs, mid, r_start, r_end).crossed ? hi : lo) = mid;
        ++iters;
    }
    const double u0 = 0.5 * (lo + hi);

    // sample the critical trajectory onto the grid, exponential tail beyond
    // the trustworthy radius
    std::vector<double> samples(grid->size(), 0.0);
    double r_valid = r_end;
    shoot(rhs, u0, r_start, r_end, &grid->nodes, &samples, &r_valid);
    double u_match = 0;
    std::size_t j_match = grid->size();
    for (std::size_t j = 0; j < grid->size(); ++j) {
        if (grid->nodes[j] <= r_valid && samples[j] > 0) {
            u_match = samples[j];
            j_match = j;
        }
    }
    if (j_match == grid->size()) throw std::runtime_error("shooting trajectory collapsed");
    const double sl = std::sqrt(lambda);
    for (std::size_t j = j_match + 1; j < grid->size(); ++j) {
        const double rj = grid->nodes[j], rm = grid->nodes[j_match];
        samples[j] = u_match * std::pow(rj / rm, -0.5 * (params.dim - 1)) *
                     std::exp(-sl * (rj - rm));
    }
    Field u(grid, samples);

    bool ok = true;
    if (opts.newton_polish)
        ok = newton_lambda_fixed(u, params, lambda, coef_q, coef_p, 100,
                                 1e-9 * std::max(1.0, l2_norm(u)), &iters);
    SolveReport rep = make_report(std::move(u), params, lambda, iters, "lambda-fixed", ok,
                                  ok ? "" : "newton polish failed", coef_q, coef_p);
    return rep;
}

SolveReport normalized_gradient_flow(const ProblemParams& params, const Field& u0, double tol,
                                     const SolverOptions& opts) {
    params.validate();
    const auto& g = *u0.grid;
    const std::size_t n = u0.values.size();
    const double c = mass(u0);
    const double coef_q = params.mu, coef_p = 1.0;
    Field u = u0;
    double E = energy(u, params).total;
    double dt = opts.dt0;
    int iters = 0;
    int stall = 0;
    // with a Newton polish downstream the flow only needs a coarse basin
    const double flow_tol = opts.newton_polish ? std::max(tol, 1e-5) : tol;
    for (; iters < opts.max_iterations; ++iters) {
        if (E < opts.energy_floor) {
            const double lam_now = multiplier_estimate(u, params);
            return make_report(std::move(u), params, lam_now, iters, "m(c)", false,
                               "unbounded-below", coef_q, coef_p);
        }
        // projected-gradient stopping test
        std::vector<double> grad = energy_gradient(u, params, coef_q, coef_p);
        const double lam = multiplier_estimate(u, params);
        std::vector<double> pg(n);
        for (std::size_t j = 0; j < n; ++j) pg[j] = grad[j] / g.quad_weights[j] + lam * u.values[j];
        const double pg_norm = weighted_norm(g, pg);
        const double pg_scale = std::max(1.0, std::sqrt(c));
        if (pg_norm < flow_tol * pg_scale) break;
        // once the basin is reached, Newton converges far faster than the flow
        if (opts.newton_polish && pg_norm < 0.05 * pg_scale && iters > 0 && iters % 200 == 0) {
            Field utry = u;
            double lamtry = lam;
            if (newton_mass_constrained(utry, lamtry, params, c, 25, 1e-9 * pg_scale, &iters)) {
                const double Etry = energy(utry, params).total;
                if (Etry <= E + 1e-10 * std::max(1.0, std::abs(E))) {
                    return make_report(std::move(utry), params, lamtry, iters, "m(c)", true, "",
                                       coef_q, coef_p);
                }
            }
        }

        // semi-implicit step: implicit diffusion, explicit nonlinearity
        std::vector<double> sub(n), diag(n), sup(n), rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            sub[j] = (j > 0) ? -dt * g.face_coeff[j] : 0.0;
            sup[j] = (j + 1 < n) ? -dt * g.face_coeff[j + 1] : 0.0;
            diag[j] = g.quad_weights[j] + dt * (g.face_coeff[j] + g.face_coeff[j + 1]);
            rhs[j] = g.quad_weights[j] * u.values[j] +
                     dt * g.singular_weights[j] *
                         (coef_q * sgn_pow(u.values[j], params.q) + sgn_pow(u.values[j], params.p));
        }
        Field trial(u.grid, solve_tridiagonal(sub, diag, sup, rhs));
        trial = normalize_to_mass(trial, c);
        const double Et = energy(trial, params).total;
        if (Et <= E + 1e-14 * std::abs(E)) {
            if (std::abs(Et - E) < 1e-15 * std::max(1.0, std::abs(E))) ++stall; else stall = 0;
            u = std::move(trial);
            E = Et;
            dt = std::min(dt * 1.25, opts.dt_max);
            if (stall > 50) break;
        } else {
            dt *= 0.5;
            if (dt < 1e-15) break;
        }
    }
    double lambda = multiplier_estimate(u, params);
    bool ok = true;
    if (opts.newton_polish)
        ok = newton_mass_constrained(u, lambda, params, c, 100,
                                     1e-9 * std::max(1.0, std::sqrt(c)), &iters);
    return make_report(std::move(u), params, lambda, iters, "m(c)", ok,
                       ok ? "" : "newton polish failed", coef_q, coef_p);
}

std::pair<double, Field> project_to_pohozaev(const Field& u, const ProblemParams& params,
                                             const std::string& branch, bool polish) {
    params.validate();
    const EnergyBreakdown e = energy(u, params);
    const double aq = 0.5 * params.dim * (params.q - 2.0) + params.b;
    const double ap = 0.5 * params.dim * (params.p - 2.0) + params.b;
    const double K2 = 2.0 * e.kinetic;
    if (K2 <= 0) throw std::runtime_error("cannot project the zero field");
    // phi(t) = dE(u_t)/dt / t; roots of phi are the fiber critical points
    auto phi = [&](double t) {
        return K2 - params.mu * aq / params.q * e.term_q * std::pow(t, aq - 2.0) -
               ap / params.p * e.term_p * std::pow(t, ap - 2.0);
    };
    const bool two_root_regime = (params.mu == 1) && (aq < 2.0) && (ap > 2.0) && e.term_q > 0;
    double t_root = 0;
    if (two_root_regime) {
        if (branch != "lower" && branch != "upper")
            throw std::runtime_error("regime has two fiber critical points; request lower or upper");
        const double t_m = std::pow(((2.0 - aq) * aq * params.p * e.term_q) /
                                        ((ap - 2.0) * ap * params.q * e.term_p),
                                    1.0 / (ap - aq));
        if (!(phi(t_m) > 0)) throw std::runtime_error("requested fiber branch is absent");
        if (branch == "lower") {
            double lo = t_m;
            while (phi(lo) > 0) { lo *= 0.5; if (lo < 1e-300) throw std::runtime_error("fiber bracket lost"); }
            t_root = brent_root(phi, lo, t_m);
        } else {
            double hi = t_m;
            while (phi(hi) > 0) { hi *= 2.0; if (hi > 1e300) throw std::runtime_error("fiber bracket lost"); }
            t_root = brent_root(phi, t_m, hi);
        }
    } else {
        if (branch != "unique")
            throw std::runtime_error("regime has a unique fiber critical point; request unique");
        double lo = 1.0, hi = 1.0;
        const double p1 = phi(1.0);
        if (p1 == 0) {
            t_root = 1.0;
        } else if (p1 > 0) {
            while (phi(hi) > 0) { hi *= 2.0; if (hi > 1e300) throw std::runtime_error("requested fiber branch is absent"); }
            t_root = brent_root(phi, hi * 0.5, hi);
        } else {
            while (phi(lo) < 0) { lo *= 0.5; if (lo < 1e-300) throw std::runtime_error("requested fiber branch is absent"); }
            t_root = brent_root(phi, lo, lo * 2.0);
        }
    }
    // polish on the discretely rescaled field: the closed form ignores the
    // interpolation error, so refine t against Q of the actual samples
    auto q_discrete = [&](double t) { return pohozaev_Q(fiber_scale(u, t), params); };
    for (double delta = polish ? 1e-4 : 1.0; delta <= 0.3; delta *= 4.0) {
        const double ta = t_root * (1.0 - delta), tb = t_root * (1.0 + delta);
        const double qa = q_discrete(ta), qb = q_discrete(tb);
        if (qa * qb < 0) {
            t_root = brent_root(q_discrete, ta, tb, 1e-15 * t_root);
            break;
        }
    }
    return {t_root, fiber_scale(u, t_root)};
}

namespace {

std::string saddle_branch(const ProblemParams& params) {
    const double aq = 0.5 * params.dim * (params.q - 2.0) + params.b;
    const double ap = 0.5 * params.dim * (params.p - 2.0) + params.b;
    return (params.mu == 1 && aq < 2.0 && ap > 2.0) ? "upper" : "unique";
}

// Tangential descent on the mass sphere alternated with fiber projection.
SolveReport saddle_solve(const ProblemParams& params, double c, const SolverOptions& opts,
                         GridPtr grid, const Field* seed, const std::string& tag) {
    params.validate();
    if (!(c > 0)) throw std::invalid_argument("mass must be positive");
    if (!grid) grid = build_grid(params, opts.n_nodes, opts.r_max);
    const std::string branch = saddle_branch(params);
    const double pc = params.critical_exponent();
    const bool revisited_critical = (params.mu == -1) && std::abs(params.p - pc) < 1e-9;

    Field u = seed ? normalize_to_mass(*seed, c) : gaussian_seed(grid, c);
    if (revisited_critical) {
        // membership set requires |grad u|^2 < (2/p) T_p; the single-power
        // ground state normalized to mass c is the standard witness
        EnergyBreakdown e = energy(u, params);
        if (!(2.0 * e.kinetic < 2.0 / params.p * e.term_p)) {
            SolveReport w = solve_lambda_fixed(params, 1.0, false, opts, grid);
            u = normalize_to_mass(w.state, c);
            e = energy(u, params);
            if (!(2.0 * e.kinetic < 2.0 / params.p * e.term_p))
                throw std::runtime_error("no admissible seed: mass below the existence threshold");
        }
    }
    auto admissible = [&](const Field& v) {
        if (!revisited_critical) return true;
        const EnergyBreakdown e = energy(v, params);
        return 2.0 * e.kinetic < 2.0 / params.p * e.term_p;
    };

    double t0;
    std::tie(t0, u) = project_to_pohozaev(u, params, branch, /*polish=*/false);
    double E = energy(u, params).total;
    double step = 0.05;
    int iters = 0;
    const auto& g = *grid;
    const std::size_t n = g.size();
    const double descent_tol = opts.newton_polish ? std::max(opts.tol, 1e-5) : opts.tol;
    for (; iters < 20000; ++iters) {
        std::vector<double> grad = energy_gradient(u, params, params.mu, 1.0);
        const double lam = multiplier_estimate(u, params);
        std::vector<double> pg(n);
        for (std::size_t j = 0; j < n; ++j) pg[j] = grad[j] / g.quad_weights[j] + lam * u.values[j];
        const double pg_norm = weighted_norm(g, pg);
        const double pg_scale = std::max(1.0, std::sqrt(c));
        if (pg_norm < descent_tol * pg_scale) break;
        if (opts.newton_polish && pg_norm < 0.05 * pg_scale && iters % 100 == 0 && iters > 0) {
            Field utry = u;
            double lamtry = lam;
            if (newton_mass_constrained(utry, lamtry, params, c, 25, 1e-9 * pg_scale, &iters) &&
                admissible(utry)) {
                SolveReport rep = make_report(std::move(utry), params, lamtry, iters, tag, true, "",
                                              params.mu, 1.0);
                if (rep.lambda <= 0) rep.message = "nonpositive multiplier";
                return rep;
            }
        }
        bool accepted = false;
        while (step > 1e-13) {
            Field trial = u;
            const double scale = step / std::max(pg_norm, 1e-300);
            for (std::size_t j = 0; j < n; ++j) trial.values[j] -= scale * pg[j];
            trial = normalize_to_mass(trial, c);
            if (!admissible(trial)) { step *= 0.5; continue; }
            try {
                auto [tt, proj] = project_to_pohozaev(trial, params, branch, /*polish=*/false);
                const double Et = energy(proj, params).total;
                if (Et < E - 1e-15 * std::abs(E)) {
                    u = std::move(proj);
                    E = Et;
                    step = std::min(step * 1.3, 1.0);
                    accepted = true;
                    break;
                }
            } catch (const std::runtime_error&) {
                // projection lost the branch; shorten the step
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    double lambda = multiplier_estimate(u, params);
    bool ok = true;
    if (opts.newton_polish)
        ok = newton_mass_constrained(u, lambda, params, c, 100,
                                     1e-9 * std::max(1.0, std::sqrt(c)), &iters);
    SolveReport rep =
        make_report(std::move(u), params, lambda, iters, tag, ok,
                    ok ? "" : "newton polish failed", params.mu, 1.0);
    if (ok && lambda <= 0) rep.message = "nonpositive multiplier";
    return rep;
}

}  // namespace

SolveReport mountain_pass_solve(const ProblemParams& params, double c, const SolverOptions& opts,
                                GridPtr grid, const Field* seed) {
    const std::string tag = saddle_branch(params) == "upper" ? "sigma_-(c)" : "sigma(c)";
    return saddle_solve(params, c, opts, std::move(grid), seed, tag);
}

SolveReport local_min_solve(const ProblemParams& params, double c, const SolverOptions& opts,
                            GridPtr grid) {
    params.validate();
    if (!(params.mu == 1 && params.q < params.critical_exponent() &&
          params.p > params.critical_exponent()))
        throw std::invalid_argument("local minimization needs mu=+1 and q below, p above critical");
    if (!grid) grid = build_grid(params, opts.n_nodes, opts.r_max);
    const double rho = vrho_radius(params, c);
    Field u = gaussian_seed(grid, c);
    const double k0 = std::sqrt(grad_norm_sq(u));
    if (k0 >= 0.3 * rho) u = fiber_scale(u, 0.3 * rho / k0);
    u = normalize_to_mass(u, c);

    const auto& g = *grid;
    const std::size_t n = g.size();
    double E = energy(u, params).total;
    double dt = opts.dt0;
    int iters = 0;
    bool starved = false;
    const double descent_tol = opts.newton_polish ? std::max(opts.tol, 1e-5) : opts.tol;
    for (; iters < opts.max_iterations; ++iters) {
        std::vector<double> grad = energy_gradient(u, params, params.mu, 1.0);
        const double lam = multiplier_estimate(u, params);
        std::vector<double> pg(n);
        for (std::size_t j = 0; j < n; ++j) pg[j] = grad[j] / g.quad_weights[j] + lam * u.values[j];
        const double pg_norm = weighted_norm(g, pg);
        const double pg_scale = std::max(1.0, std::sqrt(c));
        if (pg_norm < descent_tol * pg_scale) break;
        if (opts.newton_polish && pg_norm < 0.05 * pg_scale && iters % 200 == 0 && iters > 0) {
            Field utry = u;
            double lamtry = lam;
            if (newton_mass_constrained(utry, lamtry, params, c, 25, 1e-9 * pg_scale, &iters) &&
                grad_norm_sq(utry) < rho * rho) {
                return make_report(std::move(utry), params, lamtry, iters, "M(c)", true, "",
                                   params.mu, 1.0);
            }
        }
        std::vector<double> sub(n), diag(n), sup(n), rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            sub[j] = (j > 0) ? -dt * g.face_coeff[j] : 0.0;
            sup[j] = (j + 1 < n) ? -dt * g.face_coeff[j + 1] : 0.0;
            diag[j] = g.quad_weights[j] + dt * (g.face_coeff[j] + g.face_coeff[j + 1]);
            rhs[j] = g.quad_weights[j] * u.values[j] +
                     dt * g.singular_weights[j] *
                         (params.mu * sgn_pow(u.values[j], params.q) + sgn_pow(u.values[j], params.p));
        }
        Field trial(u.grid, solve_tridiagonal(sub, diag, sup, rhs));
        trial = normalize_to_mass(trial, c);
        const double Et = energy(trial, params).total;
        const bool inside = grad_norm_sq(trial) < rho * rho;
        if (inside && Et <= E + 1e-14 * std::abs(E)) {
            if (std::abs(Et - E) < 1e-15 * std::max(1.0, std::abs(E)) && dt >= opts.dt_max) break;
            u = std::move(trial);
            E = Et;
            dt = std::min(dt * 1.25, opts.dt_max);
        } else {
            dt *= 0.5;
            if (dt < 1e-15) { starved = true; break; }
        }
    }
    double lambda = multiplier_estimate(u, params);
    bool ok = true;
    if (opts.newton_polish)
        ok = newton_mass_constrained(u, lambda, params, c, 100,
                                     1e-9 * std::max(1.0, std::sqrt(c)), &iters);
    else
        ok = !starved;
    SolveReport rep = make_report(std::move(u), params, lambda, iters, "M(c)", ok,
                                  ok ? "" : (starved ? "trust region starvation" : "newton polish failed"),
                                  params.mu, 1.0);
    if (ok && !(grad_norm_sq(rep.state) < rho * rho)) {
        rep.success = false;
        rep.message = "converged state not interior to the gradient ball";
    }
    return rep;
}

SolveReport refine_report(const SolveReport& coarse, const ProblemParams& params, int n_nodes,
                          double r_scale) {
    if (!coarse.success) return coarse;
    const Field& u0 = coarse.state;
    const double lambda0 = coarse.lambda;
    double r_max = u0.grid->r_max;
    if (lambda0 > 0) r_max = std::clamp(r_scale / std::sqrt(lambda0), 0.05, 200.0);
    GridPtr fine = build_grid(params, n_nodes, r_max);
    Field u = resample_to_grid(u0, fine);
    if (lambda0 > 0 && fine->r_max > u0.grid->r_max) {
        // exponential tail continuation past the coarse domain, anchored just
        // inside it: u ~ u_a (r_a/r)^{(N-1)/2} exp(-sqrt(lambda)(r - r_a))
        const double r_a = 0.9 * u0.grid->r_max;
        const double k = std::sqrt(lambda0);
        std::size_t ja = 0;
        while (ja + 1 < fine->size() && fine->nodes[ja + 1] < r_a) ++ja;
        const double ua = u.values[ja];
        if (ua > 0) {
            const double ra = fine->nodes[ja];
            for (std::size_t j = ja + 1; j < fine->size(); ++j) {
                const double r = fine->nodes[j];
                const double tail = ua * std::pow(ra / r, 0.5 * (params.dim - 1)) *
                                    std::exp(-k * (r - ra));
                u.values[j] = std::max(u.values[j], tail);
            }
        }
    }
    const double c = mass(u0);
    u = normalize_to_mass(u, c);
    double lambda = lambda0;
    int iters = 0;
    // the residual evaluation has a roundoff floor of about eps/h^2 per unit
    // of |u| (second differences of nearly equal numbers); do not ask the
    // Newton iteration to go below it
    const double floor =
        2.0 * std::numeric_limits<double>::epsilon() / (fine->h * fine->h);
    const double tol = std::max(1e-9 * std::max(1.0, std::abs(lambda0)), floor) *
                       std::max(1.0, std::sqrt(c));
    const bool ok = newton_mass_constrained(u, lambda, params, c, 60, tol, &iters);
    return make_report(std::move(u), params, lambda, coarse.iterations + iters, coarse.level_tag,
                       ok, ok ? coarse.message : "refinement Newton failed", params.mu, 1.0);
}

std::vector<std::pair<double, double>> sigma_curve(const ProblemParams& params,
                                                   const std::vector<double>& c_values,
                                                   const SolverOptions& opts) {
    // Saddle states along a curve can change scale by orders of magnitude
    // (lambda diverges towards mass thresholds), so each point is attempted on
    // a ladder of grids: the previous point's state seeds a lambda-adapted
    // grid first (Newton polish deferred to the refinement pass, where the
    // grid resolves the state), then the caller's grid warm and cold. A point
    // is accepted only when the refined state converged with a positive
    // multiplier and a small fiber-identity residual; otherwise NaN.
    std::vector<std::pair<double, double>> out;
    GridPtr base = build_grid(params, opts.n_nodes, opts.r_max);
    const std::string tag = saddle_branch(params) == "upper" ? "sigma_-(c)" : "sigma(c)";
    const int fine_nodes = std::max(2 * opts.n_nodes, 16384);
    std::optional<SolveReport> prev;
    auto validated = [&](const SolveReport& rep) -> std::optional<SolveReport> {
        if (!rep.success) return std::nullopt;
        SolveReport fine = refine_report(rep, params, fine_nodes);
        if (fine.success && fine.lambda > 0 &&
            std::abs(fine.pohozaev_residual) <= 1e-4 * grad_norm_sq(fine.state))
            return fine;
        return std::nullopt;
    };
    for (double c : c_values) {
        std::optional<SolveReport> accepted;
        // adapted grids seeded from the previous accepted point
        if (prev) {
            for (double r_scale : {10.0, 14.0, 20.0, 7.0}) {
                SolverOptions so = opts;
                so.newton_polish = false;
                so.tol = std::max(opts.tol, 1e-7);
                so.r_max = std::min(opts.r_max, r_scale / std::sqrt(prev->lambda));
                GridPtr grid = build_grid(params, opts.n_nodes, so.r_max);
                Field seed = resample_to_grid(prev->state, grid);
                try {
                    accepted = validated(saddle_solve(params, c, so, grid, &seed, tag));
                } catch (const std::exception&) {
                }
                if (accepted) break;
            }
        }
        // caller's grid, warm then cold
        if (!accepted) {
            const Field* warm = prev ? &prev->state : nullptr;
            for (int attempt = 0; attempt < (warm ? 2 : 1) && !accepted; ++attempt) {
                Field seed = warm && attempt == 0 ? resample_to_grid(*warm, base) : Field(base);
                try {
                    accepted = validated(saddle_solve(params, c, opts, base,
                                                      warm && attempt == 0 ? &seed : nullptr, tag));
                } catch (const std::exception&) {
                }
            }
        }
        if (accepted) {
            out.emplace_back(c, accepted->energy.total);
            prev = std::move(accepted);
        } else {
            out.emplace_back(c, std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

std::vector<std::pair<double, double>> m_curve(const ProblemParams& params,
                                               const std::vector<double>& c_values,
                                               const SolverOptions& opts) {
    std::vector<std::pair<double, double>> out;
    GridPtr grid = build_grid(params, opts.n_nodes, opts.r_max);
    std::optional<Field> warm;
    for (double c : c_values) {
        Field seed = warm ? normalize_to_mass(*warm, c) : gaussian_seed(grid, c);
        SolveReport rep = normalized_gradient_flow(params, seed, opts.tol, opts);
        out.emplace_back(c, rep.success ? rep.energy.total
                                        : -std::numeric_limits<double>::infinity());
        if (rep.success) warm = rep.state;
    }
    return out;
}

}  // namespace nlslab
