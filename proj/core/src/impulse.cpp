#include "optex/impulse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "row_lcp.hpp"

namespace optex {

namespace {

// Post-trade prices along the trade ladder: ladder[m] = alpha(m hx, p).
struct LadderImpact {
    ImpactKind kind;
    double lambda;
    double hx;
    double q;  // exp(-lambda hx) for the exponential family

    explicit LadderImpact(const ImpactModel& im, double hx_)
        : kind(im.kind()), lambda(im.lambda()), hx(hx_), q(std::exp(-im.lambda() * hx_)) {}
};

// One row of the obstacle problem min{(beta I - A)v, v - g} = 0. The row is
// solved by policy iteration first; projected SOR sweeps take over whenever
// the complementarity residual is not met (and always under the
// extrapolation closure, whose top row is not an M-matrix row).
class ObstacleRowSolver {
public:
    ObstacleRowSolver(const DiscreteGenerator& gen, double beta, int np, double omega,
                      double tol, long max_sweeps, UpperClosure closure)
        : row_(gen, beta, np), omega_(omega), tol_(tol), max_sweeps_(max_sweeps),
          closure_(closure) {
        dinv_.assign(np + 1, 0.0);
        ones_.assign(np + 1, 1.0);
        zeros_.assign(np + 1, 0.0);
        for (int j = 1; j < np; ++j)
            dinv_[j] = 1.0 / (beta + gen.down(j) + gen.up(j));
        ws_.resize(np);
    }

    long solve(double* v, const double* g) {
        const int np = row_.np();
        const detail::SecondOp op{ones_.data(), zeros_.data(), g};
        long sweeps = 0;
        if (closure_ == UpperClosure::DirichletW) {
            sweeps += row_.howard(op, v, ws_);
            if (row_.row_residual(op, v) <= tol_) return sweeps;
        }
        const auto& gen = row_.gen();
        for (; sweeps < max_sweeps_;) {
            ++sweeps;
            double change = 0.0;
            for (int j = 1; j < np; ++j) {
                const double gs = (gen.down(j) * v[j - 1] + gen.up(j) * v[j + 1]) * dinv_[j];
                double next = v[j] + omega_ * (gs - v[j]);
                next = std::max(next, g[j]);
                change = std::max(change, std::fabs(next - v[j]));
                v[j] = next;
            }
            if (closure_ == UpperClosure::LinearExtrapolation) {
                const double next = 2.0 * v[np - 1] - v[np - 2];
                change = std::max(change, std::fabs(next - v[np]));
                v[np] = next;
            }
            if (change <= tol_ && row_.row_residual(op, v) <= tol_) break;
        }
        return sweeps;
    }

private:
    detail::RowProblem row_;
    double omega_;
    double tol_;
    long max_sweeps_;
    UpperClosure closure_;
    std::vector<double> dinv_, ones_, zeros_;
    detail::RowScratch ws_;
};

}  // namespace

InterventionResult intervention_value(const ValueField& phi, const ImpulseProblem& problem,
                                      int i, int j) {
    const Grid2D& grid = problem.grid;
    const LadderImpact li(problem.impact, grid.hx());
    const double p = grid.p(j);
    const double hp = grid.hp();
    const int np = grid.np();

    InterventionResult best{-std::numeric_limits<double>::infinity(), 0.0};
    double ps = p;  // alpha(m hx, p)
    for (int m = 0; m <= i; ++m) {
        if (m > 0) {
            switch (li.kind) {
                case ImpactKind::Exponential: ps *= li.q; break;
                case ImpactKind::Linear: ps = std::max(p - li.lambda * li.hx * m, 0.0); break;
                case ImpactKind::None: break;
            }
        }
        const double zeta = m * li.hx;
        // post-trade x is on-grid; interpolate in p only
        const double fp = std::min(ps / hp, double(np));
        const int j0 = std::min(int(fp), np - 1);
        const double t = fp - j0;
        const int r = i - m;
        const double cont = phi(r, j0) * (1.0 - t) + phi(r, j0 + 1) * t;
        const double val = cont + zeta * ps - problem.k;
        if (val > best.value) {
            best.value = val;
            best.zeta = zeta;
        }
    }
    return best;
}

void intervention_field(const ValueField& phi, const ImpulseProblem& problem,
                        ValueField& out, std::vector<double>* zeta_out) {
    const Grid2D& grid = problem.grid;
    const int nx = grid.nx();
    const int np = grid.np();
    const LadderImpact li(problem.impact, grid.hx());
    const double hp = grid.hp();
    if (zeta_out) zeta_out->assign(grid.n_nodes(), 0.0);

    // alpha(m hx, p) = p * decay[m] for the exponential family
    std::vector<double> decay;
    if (li.kind == ImpactKind::Exponential) {
        decay.resize(nx + 1);
        decay[0] = 1.0;
        for (int m = 1; m <= nx; ++m) decay[m] = decay[m - 1] * li.q;
    }

    for (int i = 0; i <= nx; ++i) {
        for (int j = 0; j <= np; ++j) {
            const double p = grid.p(j);
            double best = -std::numeric_limits<double>::infinity();
            double best_zeta = 0.0;
            for (int m = 0; m <= i; ++m) {
                double ps;
                switch (li.kind) {
                    case ImpactKind::Exponential: ps = p * decay[m]; break;
                    case ImpactKind::Linear: ps = std::max(p - li.lambda * li.hx * m, 0.0); break;
                    default: ps = p; break;
                }
                const double fp = std::min(ps / hp, double(np));
                const int j0 = std::min(int(fp), np - 1);
                const double t = fp - j0;
                const int r = i - m;
                const double cont = phi(r, j0) * (1.0 - t) + phi(r, j0 + 1) * t;
                const double val = cont + (m * li.hx) * ps - problem.k;
                if (val > best) {
                    best = val;
                    best_zeta = m * li.hx;
                }
            }
            out(i, j) = best;
            if (zeta_out) (*zeta_out)[std::size_t(i) * (np + 1) + j] = best_zeta;
        }
    }
}

ImpulsePolicy extract_regions(const ValueField& value, const ValueField& intervention,
                              const std::vector<double>& zeta, double tol_region) {
    ImpulsePolicy pol;
    pol.nx = value.nx();
    pol.np = value.np();
    pol.zeta_star.assign(value.size(), 0.0);
    pol.region.assign(value.size(), Region::Continue);
    for (int i = 1; i <= pol.nx; ++i) {
        for (int j = 0; j <= pol.np; ++j) {
            const std::size_t n = std::size_t(i) * (pol.np + 1) + j;
            if (intervention(i, j) >= value(i, j) - tol_region) {
                pol.region[n] = Region::Trade;
                pol.zeta_star[n] = zeta[n];
            }
        }
    }
    return pol;
}

double qvi_residual(const ValueField& value, const ValueField& intervention,
                    const DiscreteGenerator& gen, const MarketModel& model,
                    const Grid2D& grid) {
    double worst = 0.0;
    const double beta = model.beta();
    for (int i = 1; i <= grid.nx(); ++i) {
        for (int j = 1; j < grid.np(); ++j) {
            const double eq = beta * value(i, j) - gen.apply(value, i, j);
            const double obs = value(i, j) - intervention(i, j);
            const double r = std::min(eq, obs) / (1.0 + std::fabs(value(i, j)));
            worst = std::max(worst, std::fabs(r));
        }
    }
    return worst;
}

ImpulseSolution solve_impulse(const ImpulseProblem& problem, const ImpulseParams& params) {
    if (!(params.omega > 0.0) || !(params.omega < 2.0))
        throw InvalidRelaxation("solve_impulse: omega must lie in (0, 2)");

    const auto t_start = std::chrono::steady_clock::now();
    const Grid2D& grid = problem.grid;
    const int nx = grid.nx();
    const int np = grid.np();
    const double tol_region =
        params.tol_region > 0.0 ? params.tol_region : 1e-5 * grid.p_max();

    const DiscreteGenerator gen = DiscreteGenerator::build(problem.model, grid);

    // warm start from the immediate-liquidation surface
    ValueField V(grid);
    for (int i = 0; i <= nx; ++i)
        for (int j = 0; j <= np; ++j)
            V(i, j) = problem.impact.liquidation_value(grid.x(i), grid.p(j));
    V.zero_boundaries();
    apply_upper_closure(V, grid, problem.impact, problem.closure);

    SolveReport report;
    report.uniqueness_guaranteed = problem.k > 0.0;
    if (problem.k == 0.0)
        report.message = "k=0: impulse QVI uniqueness not guaranteed; singular solver is authoritative";

    ValueField obstacle(grid);
    std::vector<double> zeta(grid.n_nodes(), 0.0);
    ValueField prev(grid);

    ObstacleRowSolver row_solver(gen, problem.model.beta(), np, params.omega, params.tol,
                                 params.max_inner, problem.closure);

    bool outer_converged = false;
    int outer = 0;
    for (outer = 1; outer <= params.max_outer; ++outer) {
        intervention_field(V, problem, obstacle, &zeta);
        prev = V;
        for (int i = 1; i <= nx; ++i) {
            double* vrow = V.data().data() + std::size_t(i) * (np + 1);
            const double* grow = obstacle.data().data() + std::size_t(i) * (np + 1);
            report.iterations += row_solver.solve(vrow, grow);
        }
        const double change = V.sup_diff(prev);
        if (change <= params.tol) {
            outer_converged = true;
            break;
        }
    }
    report.outer_stops = std::min(outer, params.max_outer);

    // relaxation may leave tolerance-scale negative noise; the value is
    // nonnegative by construction
    for (double& v : V.data()) v = std::max(v, 0.0);

    // final obstacle for region extraction and the residual report
    intervention_field(V, problem, obstacle, &zeta);
    report.residual = qvi_residual(V, obstacle, gen, problem.model, grid);
    report.converged = outer_converged && report.residual <= 1e-5;
    if (!report.converged && report.message.empty())
        report.message = "budgets exhausted before reaching tolerance";

    ImpulsePolicy policy = extract_regions(V, obstacle, zeta, tol_region);

    report.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(V), std::move(policy), std::move(report)};
}

int immediate_trade_count(const ImpulsePolicy& policy, const ImpulseProblem& problem, State y0) {
    const Grid2D& grid = problem.grid;
    State y = y0;
    int count = 0;
    const int guard = 4 * (grid.nx() + grid.np());
    while (y.x > 1e-12 && count < guard) {
        const int i = grid.nearest_i(y.x);
        const int j = grid.nearest_j(y.p);
        if (policy.at(i, j) != Region::Trade) break;
        const double zeta = std::min(policy.zeta(i, j), y.x);
        if (zeta <= 0.0) break;
        y = problem.impact.impulse_transition(y, zeta);
        ++count;
    }
    return count;
}

}  // namespace optex
