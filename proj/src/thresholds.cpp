#include "nlslab/thresholds.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace nlslab {

namespace {

bool near(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::mutex gn_mutex;
std::map<std::tuple<int, double, double, int, double>, GnConstant> gn_memo;

}  // namespace

GnConstant gn_constant(const ProblemParams& params, double power, const GnOptions& opts) {
    const double p = power > 0 ? power : params.p;
    const int N = params.dim;
    const double b = params.b;
    if (!(b > 0 && b < std::min(2.0, static_cast<double>(N))))
        throw std::invalid_argument("gn_constant requires 0 < b < min(2, N)");
    ProblemParams sp = params;
    sp.p = p;
    sp.q = 0.5 * (2.0 + p);  // inert; the q-power term is disabled below
    sp.mu = 1;
    sp.mass_target = 0;
    sp.validate();

    const auto key = std::make_tuple(N, b, p, opts.n_nodes, opts.r_max);
    {
        std::lock_guard<std::mutex> lock(gn_mutex);
        auto it = gn_memo.find(key);
        if (it != gn_memo.end()) return it->second;
    }

    SolverOptions sopts;
    sopts.n_nodes = opts.n_nodes;
    sopts.r_max = opts.r_max;
    SolveReport rep = solve_lambda_fixed(sp, 1.0, /*include_q_term=*/false, sopts);
    if (!rep.success) throw std::runtime_error("ground-state solve for the sharp constant failed");

    GnConstant out;
    out.q_norm_sq = mass(rep.state);
    out.residual = rep.equation_residual;
    const double A = (p - 2.0) * N + 2.0 * b;
    out.value = std::pow(A / (2.0 * p - A), (4.0 - A) / 4.0) * 2.0 * p /
                (A * std::pow(out.q_norm_sq, 0.5 * (p - 2.0)));

    std::lock_guard<std::mutex> lock(gn_mutex);
    gn_memo.emplace(key, out);
    return out;
}

double c1(const ProblemParams& params, const GnOptions& opts) {
    const int N = params.dim;
    const double b = params.b;
    const double pc = params.critical_exponent();
    if (!near(params.p, pc)) throw std::invalid_argument("c1 requires p at the mass-critical power");
    const double C = gn_constant(params, pc, opts).value;
    return std::pow((N + 2.0 - b) / (N * C), N / (2.0 - b));
}

namespace {

void require_between(const ProblemParams& params) {
    const double pc = params.critical_exponent();
    if (!(params.mu == 1 && params.q < pc && params.p > pc))
        throw std::invalid_argument("requires mu=+1 with q below and p above the critical power");
}

}  // namespace

double c2(const ProblemParams& params, const GnOptions& opts) {
    require_between(params);
    const int N = params.dim;
    const double b = params.b, p = params.p, q = params.q;
    const double Cp = gn_constant(params, p, opts).value;
    const double Cq = gn_constant(params, q, opts).value;
    const double e1 = (2.0 * (2.0 - b) - N * (q - 2.0)) / ((p - q) * (2.0 - b));
    const double e2 = (N * (p - 2.0) - 2.0 * (b - 2.0)) / ((p - q) * (2.0 - b));
    const double f1 = 2.0 * p * (2.0 * (2.0 - b) - N * (q - 2.0)) /
                      (Cp * N * (N * (p - 2.0) + 2.0 * b) * (p - q));
    const double f2 = q * (N * (p - 2.0) - 2.0 * (2.0 - b)) / (2.0 * Cq * N * (p - q));
    return std::pow(f1, e1) * std::pow(f2, e2);
}

double tilde_c2(const ProblemParams& params, const GnOptions& opts) {
    require_between(params);
    const int N = params.dim;
    const double b = params.b, p = params.p, q = params.q;
    const double Cp = gn_constant(params, p, opts).value;
    const double Cq = gn_constant(params, q, opts).value;
    const double e1 = (2.0 * (2.0 - b) - N * (q - 2.0)) / ((2.0 - b) * (p - q));
    const double e2 = (N * (p - 2.0) - 2.0 * (2.0 - b)) / ((2.0 - b) * (p - q));
    const double f1 = 2.0 * p * (2.0 * (2.0 - b) - N * (q - 2.0)) /
                      (Cp * N * (N * (p - 2.0) + 2.0 * b) * (p - q));
    const double f2 = 2.0 * q * (N * (p - 2.0) - 2.0 * (2.0 - b)) /
                      (Cq * N * (N * (q - 2.0) + 2.0 * b) * (p - q));
    return std::pow(f1, e1) * std::pow(f2, e2);
}

double hat_c2(const ProblemParams& params, const GnOptions& opts) {
    require_between(params);
    const int N = params.dim;
    const double b = params.b, p = params.p, q = params.q;
    const double Cp = gn_constant(params, p, opts).value;
    const double Cq = gn_constant(params, q, opts).value;
    const double e1 = (N * (p - 2.0) - 2.0 * (2.0 - b)) / ((p - q) * (2.0 - b));
    const double e2 = (2.0 * (2.0 - b) - N * (q - 2.0)) / ((p - q) * (2.0 - b));
    const double f1 = q * (N * (p - 2.0) - 2.0 * (2.0 - b)) / (2.0 * N * Cq * (p - q));
    const double f2 = p * (2.0 * (2.0 - b) - N * (q - 2.0)) / (2.0 * N * Cp * (p - q));
    return std::pow(f1, e1) * std::pow(f2, e2);
}

double vrho_radius(const ProblemParams& params, double c, const GnOptions& opts) {
    require_between(params);
    if (!(c > 0)) throw std::invalid_argument("mass must be positive");
    const int N = params.dim;
    const double b = params.b, p = params.p, q = params.q;
    const double Cp = gn_constant(params, p, opts).value;
    const double cpow = std::pow(c, (2.0 * (p - b) - N * (p - 2.0)) / 4.0);
    return std::pow(p * (2.0 * (2.0 - b) - N * (q - 2.0)) / (2.0 * N * Cp * (p - q) * cpow),
                    2.0 / (N * (p - 2.0) - 2.0 * (2.0 - b)));
}

double g_max_value(const ProblemParams& params, double c, const GnOptions& opts) {
    require_between(params);
    const int N = params.dim;
    const double b = params.b, p = params.p, q = params.q;
    const double Cp = gn_constant(params, p, opts).value;
    const double Cq = gn_constant(params, q, opts).value;
    const double t = vrho_radius(params, c, opts);
    return 0.5 * std::pow(t, 0.5 * (2.0 * (2.0 - b) - N * (q - 2.0))) -
           Cq / q * std::pow(c, (2.0 * (q - b) - N * (q - 2.0)) / 4.0) -
           Cp / p * std::pow(c, (2.0 * (p - b) - N * (p - 2.0)) / 4.0) *
               std::pow(t, 0.5 * N * (p - q));
}

double c3(const ProblemParams& params, const GnOptions& opts) {
    const double pc = params.critical_exponent();
    if (!(params.mu == -1 && params.p > pc))
        throw std::invalid_argument("c3 requires mu=-1 with p above the critical power");
    const int N = params.dim;
    const double b = params.b, p = params.p, q = params.q;
    const double Cp = gn_constant(params, p, opts).value;
    const double Cq = gn_constant(params, q, opts).value;
    const double e1 = (N * (p - 2.0) - 2.0 * (2.0 - b)) / ((p - q) * (2.0 - b));
    const double e2 = (2.0 * (2.0 - b) - N * (q - 2.0)) / ((p - q) * (2.0 - b));
    const double f1 = q * (N * (p - 2.0) - 2.0 * (2.0 - b)) / (2.0 * Cq * N * (p - q) * (N - b));
    const double f2 = 2.0 * p / (Cp * (N * (p - 2.0) + 2.0 * b));
    return std::pow(f1, e1) * std::pow(f2, e2);
}

double c1_star(const ProblemParams& params, const GnOptions& opts) {
    const double pc = params.critical_exponent();
    if (!(params.mu == -1 && near(params.p, pc) && params.q < params.p))
        throw std::invalid_argument("c1_star requires mu=-1 with q below and p at the critical power");
    const int N = params.dim;
    const double b = params.b, p = params.p, q = params.q;
    const double C = gn_constant(params, pc, opts).value;
    return std::pow(p * (2.0 * (q - b) - N * (q - 2.0)) / (2.0 * C * (p - q) * (N - b)),
                    N / (2.0 - b));
}

ThresholdReport threshold_report(const ProblemParams& params, const GnOptions& opts) {
    params.validate();
    ThresholdReport rep;
    const RegimeLabel regime = classify_regime(params);
    rep.regime = regime.tag;
    const double pc = params.critical_exponent();
    if (near(params.p, pc) && params.q < params.p) {
        rep.c1 = c1(params, opts);
        rep.provenance["c1"] = "closed form from the sharp constant at the critical power";
        if (params.mu == -1) {
            rep.c1_star = c1_star(params, opts);
            rep.provenance["c1_star"] = "closed form from the sharp constant at the critical power";
        }
    }
    if (params.mu == 1 && params.q < pc && params.p > pc) {
        rep.c2 = c2(params, opts);
        rep.tilde_c2 = tilde_c2(params, opts);
        rep.hat_c2 = hat_c2(params, opts);
        rep.provenance["c2"] = "two-factor closed form from sharp constants at powers p and q";
        rep.provenance["tilde_c2"] = "two-factor closed form from sharp constants at powers p and q";
        rep.provenance["hat_c2"] = "two-factor closed form from sharp constants at powers p and q";
    }
    if (params.mu == -1 && params.p > pc) {
        rep.c3 = c3(params, opts);
        rep.provenance["c3"] = "two-factor closed form from sharp constants at powers p and q";
    }
    return rep;
}

double locate_mass_threshold(const ProblemParams& params, double c_lo, double c_hi,
                             const SolverOptions& solver_opts) {
    const double pc = params.critical_exponent();
    if (!(params.mu == -1 && params.p < pc))
        throw std::invalid_argument("threshold location requires mu=-1 with both powers subcritical");
    if (!(0 < c_lo && c_lo < c_hi)) throw std::invalid_argument("bad bracket");
    SolverOptions opts = solver_opts;
    opts.newton_polish = false;
    opts.max_iterations = std::min(opts.max_iterations, 20000);
    GridPtr grid = build_grid(params, opts.n_nodes, opts.r_max);
    auto negative = [&](double c) {
        Field seed = gaussian_seed(grid, c);
        SolveReport rep = normalized_gradient_flow(params, seed, 1e-8, opts);
        return rep.energy.total < -1e-6 * c;
    };
    if (negative(c_lo) || !negative(c_hi))
        throw std::runtime_error("no sign change of the minimum energy in the bracket");
    while ((c_hi - c_lo) > 0.01 * c_hi) {
        const double mid = 0.5 * (c_lo + c_hi);
        (negative(mid) ? c_hi : c_lo) = mid;
    }
    return 0.5 * (c_lo + c_hi);
}

std::pair<double, bool> decay_alpha(const ProblemParams& params) {
    if (params.dim < 3) throw std::invalid_argument("decay exponent needs N >= 3");
    const int N = params.dim;
    const double alpha = std::max((2.0 - params.b) / (params.q - 2.0), N - 2.0);
    const double q_res = (2.0 * N - 2.0 - params.b) / (N - 2.0);
    return {alpha, std::abs(params.q - q_res) <= 1e-12 * std::max(1.0, q_res)};
}

}  // namespace nlslab
