#include "optex/validate.hpp"

#include <cmath>

#include "optex/analytic.hpp"
#include "optex/impulse.hpp"
#include "optex/montecarlo.hpp"
#include "optex/singular.hpp"

namespace optex {

double sup_relative_error_vs_w(const ValueField& v, const Grid2D& grid,
                               const ImpactModel& impact) {
    double worst = 0.0;
    for (int i = 1; i <= grid.nx(); ++i)
        for (int j = 1; j < grid.np(); ++j) {
            const double w = impact.liquidation_value(grid.x(i), grid.p(j));
            worst = std::max(worst, std::fabs(v(i, j) - w) / w);
        }
    return worst;
}

double sup_relative_diff(const ValueField& a, const ValueField& b, const Grid2D& grid) {
    double worst = 0.0;
    for (int i = 1; i <= grid.nx(); ++i)
        for (int j = 1; j < grid.np(); ++j)
            worst = std::max(worst,
                             std::fabs(a(i, j) - b(i, j)) / (1.0 + std::fabs(b(i, j))));
    return worst;
}

namespace {

constexpr double kFig1Lambda = 0.5;
constexpr double kFig1Mu = 2.0;
constexpr double kFig1Sigma = 1.0;
constexpr double kFig1Beta = 4.0;
constexpr double kFig1K = 0.2;

constexpr double kFig2Lambda = 0.5;
constexpr double kFig2Mu = 4.0;
constexpr double kFig2Sigma = 0.5;
constexpr double kFig2Beta = 1.0;

}  // namespace

std::vector<ValidationCheck> run_validation_battery(const ValidateOptions& opts) {
    std::vector<ValidationCheck> checks;
    const State probe{5.0, 2.0};

    const auto gbm = MarketModel::gbm(kFig1Mu, kFig1Sigma, kFig1Beta);
    const auto abm = MarketModel::abm(kFig2Mu, kFig2Sigma, kFig2Beta);
    const auto exp_impact = ImpactModel::exponential(kFig1Lambda);
    const Grid2D grid(10.0, 10.0, opts.nx, opts.np);

    // GBM special case: V = W for both solvers
    {
        ImpulseProblem prob(gbm, exp_impact, 0.0, grid);
        const auto sol = solve_impulse(prob);
        const double err = sup_relative_error_vs_w(sol.value, grid, exp_impact);
        checks.push_back({"impulse_gbm_matches_w", err <= 0.02 && sol.report.converged, err,
                          0.02, "sup-relative interior error vs W"});
    }
    {
        SingularProblem prob(gbm, exp_impact, grid);
        const auto sol = solve_singular(prob);
        const double err = sup_relative_error_vs_w(sol.value, grid, exp_impact);
        checks.push_back({"singular_gbm_matches_w", err <= 0.02 && sol.report.converged, err,
                          0.02, "sup-relative interior error vs W"});
    }

    // no-impact identity V(5,2) = x p
    {
        ImpulseProblem prob(gbm, ImpactModel::none(), 0.0, grid);
        const auto sol = solve_impulse(prob);
        const double v = sol.value.interp(grid, probe.x, probe.p);
        const double err = std::fabs(v - 10.0) / 10.0;
        checks.push_back({"no_impact_identity", err <= 0.02, err, 0.02,
                          "V(5,2) against the closed form x p = 10"});
    }

    // constant-rate formula and its Monte Carlo reproduction
    const double cr_analytic = constant_rate_revenue(gbm, exp_impact, probe, 1.0);
    {
        const double err = std::fabs(cr_analytic - 0.7999970);
        checks.push_back({"constant_rate_formula", err <= 1e-6, err, 1e-6,
                          "closed form at u=1, (5,2)"});
    }
    {
        SimConfig sim;
        sim.n_paths = opts.mc_paths;
        sim.seed = opts.seed;
        const auto mc = simulate_constant_rate(gbm, exp_impact, probe, 1.0, sim);
        const double err = std::fabs(mc.mean - cr_analytic);
        checks.push_back({"constant_rate_mc", err <= mc.half_width_95, err, mc.half_width_95,
                          "MC mean within its 95% CI of the closed form"});
    }

    // k -> 0 ladder against the singular solution
    {
        SingularProblem sprob(gbm, exp_impact, grid);
        const auto ssol = solve_singular(sprob);
        const double v0 = ssol.value.interp(grid, probe.x, probe.p);
        const std::vector<double> ks = {0.4, 0.2, 0.1, 0.05, 0.025};
        bool increasing = true, gap_decreasing = true;
        double prev_v = -1.0, prev_gap = 1e300, last_gap = 0.0;
        std::string detail;
        ImpulseParams ladder_params;
        ladder_params.max_outer = 200;  // small k needs more stopping rounds
        for (double k : ks) {
            ImpulseProblem prob(gbm, exp_impact, k, grid);
            const auto sol = solve_impulse(prob, ladder_params);
            const double v = sol.value.interp(grid, probe.x, probe.p);
            const double gap = v0 - v;
            increasing = increasing && (v >= prev_v - 1e-9);
            gap_decreasing = gap_decreasing && (gap <= prev_gap + 1e-9);
            prev_v = v;
            prev_gap = gap;
            last_gap = gap;
            detail += "k=" + std::to_string(k) + ": V=" + std::to_string(v) + "; ";
        }
        checks.push_back({"k_ladder_connection", increasing && gap_decreasing,
                          last_gap / v0, 0.0,
                          "V^(k)(5,2) increasing, gap to singular decreasing; " + detail});
    }

    // impulse and singular agree at k = 0 (ABM case), improving with the grid
    {
        const int nc = std::max(16, opts.nx / 2);
        const Grid2D coarse(10.0, 10.0, nc, nc);
        ImpulseParams ip;
        ip.max_outer = 200;
        double diffs[2] = {0.0, 0.0};
        const Grid2D* grids[2] = {&coarse, &grid};
        for (int g = 0; g < 2; ++g) {
            ImpulseProblem iprob(abm, exp_impact, 0.0, *grids[g]);
            SingularProblem sprob(abm, exp_impact, *grids[g]);
            const auto isol = solve_impulse(iprob, ip);
            const auto ssol = solve_singular(sprob);
            diffs[g] = sup_relative_diff(isol.value, ssol.value, *grids[g]);
        }
        checks.push_back({"impulse_singular_k0_agreement", diffs[1] < diffs[0], diffs[1],
                          diffs[0],
                          "sup-relative gap shrinks under refinement (measured fine, tol "
                          "column holds the coarse gap)"});
    }

    // solver vs simulation at the probe for the positive-cost figure problem
    {
        ImpulseProblem prob(gbm, exp_impact, kFig1K, grid);
        const auto sol = solve_impulse(prob);
        SimConfig sim;
        sim.n_paths = opts.mc_paths;
        sim.seed = opts.seed;
        const auto mc = simulate_impulse(prob, sol.policy, probe, sim);
        const double v = sol.value.interp(grid, probe.x, probe.p);
        const double tol = std::max(mc.half_width_95, 0.02 * v);
        const double err = std::fabs(mc.mean - v);
        checks.push_back({"mc_impulse_consistency", err <= tol, err, tol,
                          "simulated mean vs solver value at (5,2)"});
    }

    return checks;
}

}  // namespace optex
