#pragma once

#include <string>
#include <vector>

#include "optex/grid.hpp"
#include "optex/impact.hpp"
#include "optex/impulse.hpp"  // SolveReport, Region, InvalidRelaxation
#include "optex/market.hpp"

namespace optex {

/// Singular-control problem: the impact model only enters through its
/// marginal rate gamma(p).
struct SingularProblem {
    MarketModel model;
    ImpactModel impact;
    Grid2D grid;
    UpperClosure closure = UpperClosure::DirichletW;

    SingularProblem(MarketModel m, ImpactModel im, Grid2D g,
                    UpperClosure c = UpperClosure::DirichletW)
        : model(std::move(m)), impact(im), grid(g), closure(c) {}
};

struct FreeBoundaryPoint {
    double x = 0.0;
    double p_star = 0.0;
};

struct SingularPolicy {
    int nx = 0, np = 0;
    std::vector<Region> region;
    std::vector<FreeBoundaryPoint> free_boundary;

    Region at(int i, int j) const { return region[std::size_t(i) * (np + 1) + j]; }
};

struct SingularParams {
    double tol = 1e-7;
    long max_iter = 200000;   // projected relaxation sweeps, grand total
    double omega = 1.5;
    double tol_region = -1.0; // < 0: defaults to 1e-5 * p_max
};

struct SingularSolution {
    ValueField value;
    SingularPolicy policy;
    SolveReport report;
};

/// Backward-difference evaluation of the gradient constraint
/// gamma(p) D_p^- V + D_x^- V - p at an interior node. The variational
/// inequality requires this to be >= 0, with equality in the trade region.
double directional_residual(const ValueField& value, const SingularProblem& problem,
                            int i, int j);

/// Free boundary as the per-column p-level of the lowest Continue -> Trade
/// flag transition, linearly interpolated on the constraint residual.
/// Empty when either region is empty.
std::vector<FreeBoundaryPoint> extract_free_boundary(const SingularPolicy& policy,
                                                     const ValueField& value,
                                                     const SingularProblem& problem);

/// Solve min{beta phi - A phi, gamma(p) phi_p + phi_x - p} = 0 with projected
/// relaxation sweeps: relax the linear equation in p, then project onto the
/// binding backward-difference constraint. Both differences are upwinded
/// against the controlled flow (trades push x and p down), which makes the
/// scheme lower-triangular across x-rows.
SingularSolution solve_singular(const SingularProblem& problem,
                                const SingularParams& params = {});

}  // namespace optex
