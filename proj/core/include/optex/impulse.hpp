#pragma once

#include <string>
#include <vector>

#include "optex/grid.hpp"
#include "optex/impact.hpp"
#include "optex/market.hpp"
#include "optex/types.hpp"

namespace optex {

struct InvalidRelaxation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The impulse-control problem data: price model, impact map, fixed cost k
/// and the computational grid.
struct ImpulseProblem {
    MarketModel model;
    ImpactModel impact;
    double k = 0.0;
    Grid2D grid;
    UpperClosure closure = UpperClosure::DirichletW;

    ImpulseProblem(MarketModel m, ImpactModel im, double k_, Grid2D g,
                   UpperClosure c = UpperClosure::DirichletW)
        : model(std::move(m)), impact(im), k(k_), grid(g), closure(c) {
        if (k < 0.0) throw std::invalid_argument("ImpulseProblem: k must be >= 0");
    }
};

/// Optimal trade size and region flag per node.
struct ImpulsePolicy {
    int nx = 0, np = 0;
    std::vector<double> zeta_star;  // 0 in the continuation region
    std::vector<Region> region;

    double zeta(int i, int j) const { return zeta_star[std::size_t(i) * (np + 1) + j]; }
    Region at(int i, int j) const { return region[std::size_t(i) * (np + 1) + j]; }
};

struct SolveReport {
    long iterations = 0;      // projected relaxation sweeps, all rounds
    int outer_stops = 0;      // iterated-optimal-stopping rounds
    double residual = 0.0;    // scaled sup-norm of the discrete QVI/VI residual
    double wall_time_sec = 0.0;
    bool converged = false;
    bool uniqueness_guaranteed = true;  // false for impulse solves with k = 0
    std::string message;
};

struct ImpulseParams {
    double tol = 1e-7;        // sup-norm change between outer rounds
    int max_outer = 50;
    long max_inner = 20000;   // relaxation sweeps per obstacle solve and row
    double omega = 1.5;       // in (0, 2)
    double tol_region = -1.0; // < 0: defaults to 1e-5 * p_max
};

struct ImpulseSolution {
    ValueField value;
    ImpulsePolicy policy;
    SolveReport report;
};

/// Best immediate-trade value sup_{0<=zeta<=x} phi(Gamma(y,zeta)) + zeta alpha(zeta,p) - k
/// over the trade ladder {0, hx, 2hx, ..., x_i}, with the post-trade state
/// interpolated in p. Returns the value and the smallest maximizing zeta.
struct InterventionResult {
    double value = 0.0;
    double zeta = 0.0;
};
InterventionResult intervention_value(const ValueField& phi, const ImpulseProblem& problem,
                                      int i, int j);

/// Evaluate the intervention operator at every node.
void intervention_field(const ValueField& phi, const ImpulseProblem& problem,
                        ValueField& out, std::vector<double>* zeta_out);

/// Classify nodes: Trade where the intervention value reaches the node value
/// within tol_region, with the maximizing trade size recorded.
ImpulsePolicy extract_regions(const ValueField& value, const ValueField& intervention,
                              const std::vector<double>& zeta, double tol_region);

/// Scaled sup-norm of min{(beta I - A)V, V - MV} over interior nodes.
double qvi_residual(const ValueField& value, const ValueField& intervention,
                    const DiscreteGenerator& gen, const MarketModel& model,
                    const Grid2D& grid);

/// Solve min{beta phi - A phi, phi - M phi} = 0 by iterated optimal stopping:
/// each round freezes the obstacle M V_n and solves the resulting stopping
/// problem with projected relaxation sweeps. Never throws on exhausted
/// budgets; the report carries converged = false and the residual instead.
ImpulseSolution solve_impulse(const ImpulseProblem& problem, const ImpulseParams& params = {});

/// Number of consecutive trades the policy performs at time zero from y0
/// before the state enters the continuation region (nearest-node lookup,
/// exact impact transitions).
int immediate_trade_count(const ImpulsePolicy& policy, const ImpulseProblem& problem, State y0);

}  // namespace optex
