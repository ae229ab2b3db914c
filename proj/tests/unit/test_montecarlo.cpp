#include <doctest.h>

#include <cmath>

#include "optex/analytic.hpp"
#include "optex/montecarlo.hpp"

using namespace optex;

namespace {

const MarketModel kGbm = MarketModel::gbm(2.0, 1.0, 4.0);
const ImpactModel kExp = ImpactModel::exponential(0.5);

ImpulsePolicy uniform_policy(const Grid2D& g, Region r, bool zeta_full) {
    ImpulsePolicy pol;
    pol.nx = g.nx();
    pol.np = g.np();
    pol.region.assign(g.n_nodes(), r);
    pol.zeta_star.assign(g.n_nodes(), 0.0);
    if (zeta_full)
        for (int i = 0; i <= g.nx(); ++i)
            for (int j = 0; j <= g.np(); ++j)
                pol.zeta_star[std::size_t(i) * (g.np() + 1) + j] = g.x(i);
    return pol;
}

}  // namespace

TEST_CASE("never-trade policy earns exactly zero") {
    const Grid2D g(10.0, 10.0, 16, 16);
    ImpulseProblem prob(kGbm, kExp, 0.2, g);
    const auto pol = uniform_policy(g, Region::Continue, false);
    SimConfig cfg;
    cfg.n_paths = 200;
    const auto r = simulate_impulse(prob, pol, {5.0, 2.0}, cfg);
    CHECK(r.mean == 0.0);
    CHECK(r.half_width_95 == 0.0);
}

TEST_CASE("sell-everything-now policy under no impact pays x p exactly") {
    const Grid2D g(10.0, 10.0, 16, 16);
    ImpulseProblem prob(kGbm, ImpactModel::none(), 0.0, g);
    const auto pol = uniform_policy(g, Region::Trade, true);
    SimConfig cfg;
    cfg.n_paths = 500;
    const auto r = simulate_impulse(prob, pol, {5.0, 2.0}, cfg);
    CHECK(r.mean == 10.0);  // deterministic single term at t = 0
    CHECK(r.half_width_95 == 0.0);
}

TEST_CASE("constant-rate simulation reproduces the closed form") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 42;
    const State y{5.0, 2.0};
    const double exact = constant_rate_revenue(kGbm, kExp, y, 1.0);
    const auto r = simulate_constant_rate(kGbm, kExp, y, 1.0, cfg);
    CHECK(std::fabs(r.mean - exact) <= r.half_width_95);
    CHECK(r.n_paths == 20000);
    CHECK(r.seed == 42);
    CHECK(r.tail_bound <= 1e-9);  // e^{-beta T} scale

    // x0 = 0 earns nothing
    const auto zero = simulate_constant_rate(kGbm, kExp, {0.0, 2.0}, 1.0, cfg);
    CHECK(zero.mean == 0.0);
}

TEST_CASE("constant-rate means rise along the u-ladder toward W") {
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.seed = 11;
    const State y{5.0, 2.0};
    const double w = kExp.liquidation_value(5.0, 2.0);
    double prev = -1.0;
    for (double u : {1.0, 4.0, 16.0, 64.0}) {
        const auto r = simulate_constant_rate(kGbm, kExp, y, u, cfg);
        CHECK(r.mean > prev);  // common random numbers keep this strict
        CHECK(r.mean <= w + 0.02);
        prev = r.mean;
    }
    CHECK(prev >= w * 0.90);
}

TEST_CASE("identical seeds reproduce bit-identical results") {
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.seed = 1234;
    const State y{5.0, 2.0};
    const auto a = simulate_constant_rate(kGbm, kExp, y, 2.0, cfg);
    const auto b = simulate_constant_rate(kGbm, kExp, y, 2.0, cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.half_width_95 == b.half_width_95);

    cfg.seed = 1235;
    const auto c = simulate_constant_rate(kGbm, kExp, y, 2.0, cfg);
    CHECK(a.mean != c.mean);
}

TEST_CASE("no-impact constant rate matches the discounted mean-price integral") {
    // with gamma = 0 the revenue is u * integral e^{-beta t} P_t dt up to
    // t = x0/u, whose expectation is closed-form for ABM and OU
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 31;
    const auto none = ImpactModel::none();
    const double u = 1.0, x0 = 3.0, T = x0 / u;

    SUBCASE("ABM") {
        const double p0 = 2.0, mu = 1.0, beta = 1.0;
        const auto abm = MarketModel::abm(mu, 0.2, beta);
        const double eT = std::exp(-beta * T);
        const double exact =
            u * (p0 * (1.0 - eT) / beta + mu * (1.0 - eT * (1.0 + beta * T)) / (beta * beta));
        const auto r = simulate_constant_rate(abm, none, {x0, p0}, u, cfg);
        CHECK(std::fabs(r.mean - exact) <= std::max(1.5 * r.half_width_95, 1e-3 * exact));
    }

    SUBCASE("OU") {
        const double p0 = 2.0, rate = 2.0, m = 5.0, beta = 1.0;
        const auto ou = MarketModel::ou(rate, m, 0.2, beta);
        // E[P_t] = m + (p0 - m) e^{-rate t}
        const double exact =
            u * (m * (1.0 - std::exp(-beta * T)) / beta +
                 (p0 - m) * (1.0 - std::exp(-(rate + beta) * T)) / (rate + beta));
        const auto r = simulate_constant_rate(ou, none, {x0, p0}, u, cfg);
        CHECK(std::fabs(r.mean - exact) <= std::max(1.5 * r.half_width_95, 1e-3 * exact));
    }
}

TEST_CASE("halving dt moves the constant-rate mean by less than the CI") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 5;
    const State y{5.0, 2.0};
    const auto coarse = simulate_constant_rate(kGbm, kExp, y, 2.0, cfg);
    cfg.dt = 0.5 * (1e-3 / kGbm.beta());
    const auto fine = simulate_constant_rate(kGbm, kExp, y, 2.0, cfg);
    CHECK(std::fabs(fine.mean - coarse.mean) < coarse.half_width_95);
}

TEST_CASE("absorption at zero stops revenue accrual") {
    // strongly negative ABM drift forces absorption almost immediately;
    // the deterministic crossing time bounds the collectable revenue
    const auto abm = MarketModel::abm(-100.0, 0.05, 1.0);
    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.seed = 9;
    cfg.dt = 1e-5;
    cfg.horizon = 25.0;
    const auto r = simulate_constant_rate(abm, kExp, {5.0, 0.5}, 1.0, cfg);
    CHECK(r.mean >= 0.0);
    CHECK(r.mean <= 3e-3);  // ~ u p0 t0 / 2 with t0 = p0/|mu|
}

TEST_CASE("antithetic variates keep the estimate and tighten the CI") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 21;
    const State y{5.0, 2.0};
    const double exact = constant_rate_revenue(kGbm, kExp, y, 4.0);
    const auto plain = simulate_constant_rate(kGbm, kExp, y, 4.0, cfg);
    cfg.antithetic = true;
    const auto anti = simulate_constant_rate(kGbm, kExp, y, 4.0, cfg);
    CHECK(std::fabs(plain.mean - exact) <= 3.0 * plain.half_width_95);
    CHECK(std::fabs(anti.mean - exact) <= 3.0 * anti.half_width_95);
    CHECK(anti.half_width_95 < plain.half_width_95);
}

TEST_CASE("estimator consistency: admissible strategies cannot beat the value") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 3;
    const State y{5.0, 2.0};
    const double w = kExp.liquidation_value(5.0, 2.0);  // = V for this case
    for (double u : {1.0, 16.0, 256.0}) {
        const auto r = simulate_constant_rate(kGbm, kExp, y, u, cfg);
        CHECK(r.mean - r.half_width_95 <= w + r.tail_bound + 1e-9);
    }
}

TEST_CASE("boundary-tracking simulation approaches W in the all-trade case") {
    const Grid2D g(10.0, 10.0, 50, 50);
    SingularProblem prob(kGbm, kExp, g);
    const auto sol = solve_singular(prob);
    SimConfig cfg;
    cfg.n_paths = 500;
    cfg.seed = 17;
    const double w = kExp.liquidation_value(5.0, 2.0);
    const auto r = simulate_singular_boundary(prob, sol.policy, {5.0, 2.0}, cfg, 1e4);
    CHECK(r.mean <= w + 1e-6);
    CHECK(r.mean >= 0.98 * w);

    // larger caps do at least as well, up to noise
    double prev = -1.0;
    for (double cap : {1e2, 1e3, 1e4}) {
        const auto s = simulate_singular_boundary(prob, sol.policy, {5.0, 2.0}, cfg, cap);
        CHECK(s.mean >= prev - s.half_width_95);
        prev = s.mean;
    }
}

TEST_CASE("nonpositive drift collapses the boundary: simulated mean near W") {
    // waiting has no value for mu <= 0, so the whole interior trades and the
    // boundary-tracking strategy liquidates immediately
    const Grid2D g(10.0, 10.0, 50, 50);
    SingularProblem prob(MarketModel::abm(-1.0, 0.5, 1.0), kExp, g);
    const auto sol = solve_singular(prob);
    SimConfig cfg;
    cfg.n_paths = 500;
    cfg.seed = 23;
    const auto r = simulate_singular_boundary(prob, sol.policy, {5.0, 2.0}, cfg, 1e4);
    const double w = kExp.liquidation_value(5.0, 2.0);
    CHECK(r.mean >= 0.97 * w);
    CHECK(r.mean <= w + 1e-9);
}

TEST_CASE("simulation rejects mismatched policies and bad configs") {
    const Grid2D g(10.0, 10.0, 16, 16);
    const Grid2D other(10.0, 10.0, 20, 20);
    ImpulseProblem prob(kGbm, kExp, 0.2, g);
    const auto pol = uniform_policy(other, Region::Continue, false);
    SimConfig cfg;
    cfg.n_paths = 200;
    CHECK_THROWS_AS(simulate_impulse(prob, pol, {5.0, 2.0}, cfg), InvalidPolicy);

    SimConfig bad;
    bad.n_paths = 10;  // below the floor
    const auto ok_pol = uniform_policy(g, Region::Continue, false);
    CHECK_THROWS_AS(simulate_impulse(prob, ok_pol, {5.0, 2.0}, bad), std::invalid_argument);

    SimConfig shallow;
    shallow.n_paths = 200;
    shallow.horizon = 1.0;  // beta * horizon = 4 < 20
    CHECK_THROWS_AS(simulate_impulse(prob, ok_pol, {5.0, 2.0}, shallow), std::invalid_argument);
}
