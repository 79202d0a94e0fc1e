// Grid, quadrature, energy and fiber-map checks against closed-form and
// finite-difference oracles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlslab/functionals.hpp"
#include "nlslab/rng.hpp"

using namespace nlslab;

namespace {

ProblemParams params_n3() {
    ProblemParams p;
    p.dim = 3;
    p.b = 0.5;
    p.q = 2.5;
    p.p = 4.0;
    p.mu = 1;
    return p;
}

Field gaussian(const GridPtr& g, double width = 1.0) {
    Field u(g);
    for (std::size_t j = 0; j < g->size(); ++j)
        u.values[j] = std::exp(-g->nodes[j] * g->nodes[j] / (2.0 * width * width));
    return u;
}

}  // namespace

TEST_CASE("cell-centered node arithmetic") {
    ProblemParams p = params_n3();
    p.b = 1.0;
    p.p = 3.5;  // keep p below the Sobolev limit 2(N-b)/(N-2) = 4
    auto g = build_grid(p, 16, 1.0);
    CHECK(g->h == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(g->nodes[0] == doctest::Approx(0.5 / 16).epsilon(1e-15));
    CHECK(g->nodes[15] == doctest::Approx(15.5 / 16).epsilon(1e-15));
    for (std::size_t j = 1; j < g->size(); ++j) CHECK(g->nodes[j] > g->nodes[j - 1]);
    CHECK_THROWS(build_grid(p, 8, 1.0));
    CHECK_THROWS(build_grid(p, 64, -1.0));
}

TEST_CASE("quadrature of 1 gives the ball volume") {
    ProblemParams p = params_n3();
    auto g = build_grid(p, 64, 1.0);
    double vol = 0;
    for (double w : g->quad_weights) vol += w;
    CHECK(vol == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));
    for (double w : g->quad_weights) CHECK(w > 0);
    for (double w : g->singular_weights) CHECK(w > 0);
}

TEST_CASE("singular quadrature of 1, N=3 b=1") {
    ProblemParams p = params_n3();
    p.b = 1.0;
    p.p = 3.5;  // keep p below the Sobolev limit 2(N-b)/(N-2) = 4
    auto g = build_grid(p, 64, 1.0);
    double val = 0;
    for (double w : g->singular_weights) val += w;
    CHECK(val == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
}

TEST_CASE("mass of zero field and of a gaussian") {
    ProblemParams p = params_n3();
    auto g = build_grid(p, 4096, 12.0);
    Field zero(g);
    CHECK(mass(zero) == 0.0);
    Field u = gaussian(g);
    CHECK(mass(u) == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(5e-3));
    Field v = normalize_to_mass(u, 2.5);
    CHECK(mass(v) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS(normalize_to_mass(zero, 1.0));
}

TEST_CASE("energy components and the mu sign flip") {
    ProblemParams p = params_n3();
    auto g = build_grid(p, 2048, 12.0);
    Field zero(g);
    EnergyBreakdown e0 = energy(zero, p);
    CHECK(e0.kinetic == 0.0);
    CHECK(e0.term_q == 0.0);
    CHECK(e0.term_p == 0.0);
    CHECK(e0.total == 0.0);

    Field u = gaussian(g);
    EnergyBreakdown eplus = energy(u, p);
    ProblemParams pm = p;
    pm.mu = -1;
    EnergyBreakdown eminus = energy(u, pm);
    CHECK(eminus.total - eplus.total ==
          doctest::Approx(2.0 / p.q * eplus.term_q).epsilon(1e-12));
    CHECK(eplus.total == doctest::Approx(eplus.kinetic - eplus.term_q / p.q -
                                         eplus.term_p / p.p).epsilon(1e-12));
    CHECK(eplus.kinetic >= 0);
    CHECK(eplus.term_q >= 0);
    CHECK(eplus.term_p >= 0);
}

TEST_CASE("gaussian energy against the closed-form oracle, N=1") {
    // u = exp(-r^2/2), N=1, b=1/2, q=3, p=4: all three integrals reduce to
    // gamma functions; int_0^inf r^{a-1} exp(-l r^2) dr = Gamma(a/2) l^{-a/2}/2.
    ProblemParams p;
    p.dim = 1;
    p.b = 0.5;
    p.q = 3;
    p.p = 4;
    p.mu = 1;
    auto g = build_grid(p, 4096, 12.0);
    Field u = gaussian(g);
    EnergyBreakdown e = energy(u, p);
    const double g14 = std::tgamma(0.25);
    const double kin_expected = 0.25 * std::sqrt(M_PI);
    const double tq_expected = g14 * std::pow(1.5, -0.25);
    const double tp_expected = g14 * std::pow(2.0, -0.25);
    CHECK(e.kinetic == doctest::Approx(kin_expected).epsilon(1e-4));
    CHECK(e.term_q == doctest::Approx(tq_expected).epsilon(1e-4));
    CHECK(e.term_p == doctest::Approx(tp_expected).epsilon(1e-4));
    const double total_expected = kin_expected - tq_expected / 3.0 - tp_expected / 4.0;
    CHECK(e.total == doctest::Approx(total_expected).epsilon(1e-4));
}

TEST_CASE("fiber derivatives match finite differences of the closed form") {
    ProblemParams p = params_n3();
    auto g = build_grid(p, 1024, 12.0);
    CounterRng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        Field u = random_smooth_field(g, rng);
        const double dh = 1e-5;
        const double fd1 = (fiber_energy(u, 1 + dh, p) - fiber_energy(u, 1 - dh, p)) / (2 * dh);
        const double fd2 = (fiber_energy(u, 1 + dh, p) - 2 * fiber_energy(u, 1, p) +
                            fiber_energy(u, 1 - dh, p)) / (dh * dh);
        CHECK(pohozaev_Q(u, p) == doctest::Approx(fd1).epsilon(1e-6));
        CHECK(psi_second_variation(u, p) == doctest::Approx(fd2).epsilon(1e-5));
    }
    Field zero(g);
    CHECK(pohozaev_Q(zero, p) == 0.0);
    CHECK(psi_second_variation(zero, p) == 0.0);
}

TEST_CASE("fiber rescale: identity, mass invariance, energy consistency") {
    ProblemParams p = params_n3();
    auto g = build_grid(p, 4096, 12.0);
    Field u = gaussian(g);
    CHECK_THROWS(fiber_scale(u, 0.0));
    CHECK_THROWS(fiber_scale(u, -1.0));

    Field same = fiber_scale(u, 1.0);
    for (std::size_t j = 0; j < u.values.size(); ++j)
        CHECK(same.values[j] == doctest::Approx(u.values[j]).epsilon(1e-12));

    // narrow profile so the widened rescale (t = 0.1) still fits in [0, r_max]
    Field w = gaussian(g, 0.25);
    const double m0 = mass(w);
    for (double t : {0.1, 0.5, 2.0, 10.0})
        CHECK(mass(fiber_scale(w, t)) == doctest::Approx(m0).epsilon(1e-6));

    CounterRng rng(11);
    for (int trial = 0; trial < 4; ++trial) {
        Field v = random_smooth_field(g, rng);
        for (double t : {0.5, 1.0, 2.0}) {
            const double closed = fiber_energy(v, t, p);
            const double direct = energy(fiber_scale(v, t), p).total;
            CHECK(std::abs(direct - closed) <= 1e-4 * (1.0 + std::abs(closed)));
        }
    }
}

TEST_CASE("fiber energy limits in the expected regimes") {
    ProblemParams p = params_n3();  // q below, p above the critical power 3
    auto g = build_grid(p, 2048, 12.0);
    Field u = gaussian(g);
    CHECK(fiber_energy(u, 1e-3, p) < 0);   // small-scale side, focusing q-term wins
    CHECK(fiber_energy(u, 1e3, p) < -1e6); // supercritical p drives E to -infinity
    CHECK(fiber_energy(u, 1.0, p) == doctest::Approx(energy(u, p).total).epsilon(1e-14));
}

TEST_CASE("fiber scan finds bracketed critical points with morse signs") {
    ProblemParams p = params_n3();
    auto g = build_grid(p, 2048, 12.0);
    Field u = normalize_to_mass(gaussian(g), 0.05);
    FiberScan scan = fiber_scan(u, p);
    REQUIRE(!scan.critical_points.empty());
    const EnergyBreakdown e = energy(u, p);
    for (const auto& cp : scan.critical_points) {
        CHECK(std::abs(fiber_denergy(e, cp.t, p)) <=
              1e-8 * (1.0 + std::abs(fiber_d2energy(e, cp.t, p)) * cp.t));
        const double d2 = fiber_d2energy(e, cp.t, p);
        if (cp.morse_sign != 0) CHECK(cp.morse_sign == ((d2 > 0) ? 1 : -1));
    }
}

TEST_CASE("regime classification hand values") {
    ProblemParams a;
    a.dim = 2; a.b = 1.0; a.q = 2.5; a.p = 3.0; a.mu = 1;
    CHECK(classify_regime(a).p_regime == "critical");  // p_c = 2 + 2(2-1)/2 = 3

    ProblemParams bb = params_n3();
    RegimeLabel rb = classify_regime(bb);  // p_c = 2 + 2(1.5)/3 = 3
    CHECK(rb.q_regime == "subcritical");
    CHECK(rb.p_regime == "supercritical");

    ProblemParams c;
    c.dim = 1; c.b = 0.5; c.q = 2.2; c.p = 2.4; c.mu = 1;
    RegimeLabel rc = classify_regime(c);  // p_c = 2 + 2(1.5)/1 = 5
    CHECK(c.critical_exponent() == doctest::Approx(5.0));
    CHECK(rc.q_regime == "subcritical");
    CHECK(rc.p_regime == "subcritical");
}

TEST_CASE("parameter validation") {
    ProblemParams p = params_n3();
    CHECK_NOTHROW(p.validate());
    p.b = 2.5;
    CHECK_THROWS(p.validate());
    p = params_n3();
    p.q = 4.5;  // q > p
    CHECK_THROWS(p.validate());
    p = params_n3();
    p.p = 7.0;  // above 2(N-b)/(N-2) = 5
    CHECK_THROWS(p.validate());
    p = params_n3();
    p.mu = 2;
    CHECK_THROWS(p.validate());
}
