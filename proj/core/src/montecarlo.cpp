#include "optex/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "optex/rng.hpp"

namespace optex {

namespace {

struct ResolvedSim {
    long n_paths;
    double dt;
    double horizon;
    std::uint64_t seed;
    bool antithetic;
};

ResolvedSim resolve(const SimConfig& cfg, double beta) {
    ResolvedSim r;
    r.n_paths = cfg.n_paths;
    r.dt = cfg.dt > 0.0 ? cfg.dt : 1e-3 / beta;
    r.horizon = cfg.horizon > 0.0 ? cfg.horizon : 25.0 / beta;
    r.seed = cfg.seed;
    r.antithetic = cfg.antithetic;
    if (r.n_paths < 100) throw std::invalid_argument("SimConfig: need at least 100 paths");
    if (!(r.dt > 0.0) || r.dt > r.horizon)
        throw std::invalid_argument("SimConfig: dt must lie in (0, horizon]");
    if (beta * r.horizon < 20.0)
        throw std::invalid_argument("SimConfig: beta * horizon must be >= 20");
    if (r.antithetic && (r.n_paths % 2)) ++r.n_paths;
    return r;
}

// Exact one-step transition of the unperturbed price. ABM and OU clamp to 0
// and report absorption.
struct ExactStep {
    ProcessKind kind;
    double a = 0.0, b = 0.0, decay = 0.0, mean = 0.0;

    ExactStep(const MarketModel& m, double dt) : kind(m.kind()) {
        switch (kind) {
            case ProcessKind::GBM:
                a = (m.mu() - 0.5 * m.sigma() * m.sigma()) * dt;
                b = m.sigma() * std::sqrt(dt);
                break;
            case ProcessKind::ABM:
                a = m.mu() * dt;
                b = m.sigma() * std::sqrt(dt);
                break;
            case ProcessKind::OU:
                decay = std::exp(-m.ou_rate() * dt);
                mean = m.ou_mean();
                b = m.sigma() * std::sqrt((1.0 - decay * decay) / (2.0 * m.ou_rate()));
                break;
        }
    }

    // returns the new price; sets absorbed when the path hits 0
    double advance(double p, double z, bool& absorbed) const {
        switch (kind) {
            case ProcessKind::GBM:
                return p * std::exp(a + b * z);
            case ProcessKind::ABM: {
                const double q = p + a + b * z;
                if (q <= 0.0) {
                    absorbed = true;
                    return 0.0;
                }
                return q;
            }
            case ProcessKind::OU: {
                const double q = mean + (p - mean) * decay + b * z;
                if (q <= 0.0) {
                    absorbed = true;
                    return 0.0;
                }
                return q;
            }
        }
        return p;
    }
};

struct Stats {
    double mean = 0.0;
    double half_width = 0.0;
};

Stats reduce(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    double sum = 0.0;
    for (double s : samples) sum += s;
    const double mean = sum / double(n);
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    const double var = n > 1 ? ss / double(n - 1) : 0.0;
    return {mean, 1.96 * std::sqrt(var / double(n))};
}

double tail_bound_scale(State y0, double beta, double horizon) {
    return y0.x * y0.p * std::exp(-beta * horizon);
}

// Runs every path (antithetic pairs share a stream with flipped signs) and
// reduces in path order, so the estimate is independent of scheduling.
template <typename PathFn>
SimResult run_paths(const ResolvedSim& rs, State y0, double beta, PathFn&& path) {
    std::vector<double> samples;
    if (rs.antithetic) {
        const long pairs = rs.n_paths / 2;
        samples.resize(pairs);
        for (long m = 0; m < pairs; ++m) {
            PathRng rng_a(rs.seed, std::uint64_t(m));
            PathRng rng_b(rs.seed, std::uint64_t(m));
            samples[m] = 0.5 * (path(rng_a, +1.0) + path(rng_b, -1.0));
        }
    } else {
        samples.resize(rs.n_paths);
        for (long m = 0; m < rs.n_paths; ++m) {
            PathRng rng(rs.seed, std::uint64_t(m));
            samples[m] = path(rng, +1.0);
        }
    }
    const Stats st = reduce(samples);
    return {st.mean, st.half_width, rs.n_paths, tail_bound_scale(y0, beta, rs.horizon), rs.seed};
}

}  // namespace

SimResult simulate_impulse(const ImpulseProblem& problem, const ImpulsePolicy& policy,
                           State y0, const SimConfig& cfg) {
    const Grid2D& grid = problem.grid;
    if (policy.nx != grid.nx() || policy.np != grid.np())
        throw InvalidPolicy("simulate_impulse: policy grid does not match the problem grid");
    const double beta = problem.model.beta();
    const ResolvedSim rs = resolve(cfg, beta);
    const ExactStep step(problem.model, rs.dt);
    const double disc_dt = std::exp(-beta * rs.dt);
    const long n_steps = long(std::ceil(rs.horizon / rs.dt));
    const int trade_guard = 4 * (grid.nx() + grid.np());

    auto path = [&](PathRng& rng, double sign) -> double {
        double x = y0.x, p = y0.p, disc = 1.0, rev = 0.0;
        bool absorbed = p <= 0.0;
        for (long s = 0; s <= n_steps; ++s) {
            // execute all same-instant trades the policy requests here
            int guard = 0;
            while (x > 1e-12 && p > 0.0 && guard++ < trade_guard) {
                const int i = grid.nearest_i(x);
                const int j = grid.nearest_j(p);
                if (policy.at(i, j) != Region::Trade) break;
                const double zeta = std::min(policy.zeta(i, j), x);
                if (zeta <= 0.0) break;
                p = problem.impact.post_trade_price(zeta, p).price;
                rev += disc * (zeta * p - problem.k);
                x -= zeta;
            }
            if (x <= 1e-12 || absorbed || s == n_steps) break;
            p = step.advance(p, sign * rng.next_normal(), absorbed);
            disc *= disc_dt;
        }
        return rev;
    };

    return run_paths(rs, y0, beta, path);
}

SimResult simulate_constant_rate(const MarketModel& model, const ImpactModel& impact,
                                 State y0, double u, const SimConfig& cfg) {
    if (!(u > 0.0)) throw std::invalid_argument("simulate_constant_rate: u must be > 0");
    const double beta = model.beta();
    const ResolvedSim rs = resolve(cfg, beta);

    const double disc_full = std::exp(-beta * rs.dt);
    const double sqrt_dt = std::sqrt(rs.dt);

    auto path = [&](PathRng& rng, double sign) -> double {
        double x = y0.x, p = y0.p, t = 0.0, rev = 0.0;
        double disc = 1.0;
        while (x > 0.0 && t < rs.horizon && p > 0.0) {
            const double dt_eff = std::min(rs.dt, x / u);
            const bool full = dt_eff == rs.dt;
            const double f0 = disc * p * u;
            const double z = sign * rng.next_normal();
            double pn = p + (model.drift(p) - impact.marginal_impact(p) * u) * dt_eff +
                        model.volatility(p) * (full ? sqrt_dt : std::sqrt(dt_eff)) * z;
            if (pn <= 0.0) pn = 0.0;  // absorbed: no further revenue
            t += dt_eff;
            disc = full ? disc * disc_full : std::exp(-beta * t);
            rev += 0.5 * (f0 + disc * pn * u) * dt_eff;
            x -= u * dt_eff;
            p = pn;
        }
        return rev;
    };

    return run_paths(rs, y0, beta, path);
}

SimResult simulate_singular_boundary(const SingularProblem& problem,
                                     const SingularPolicy& policy, State y0,
                                     const SimConfig& cfg, double u_cap) {
    const Grid2D& grid = problem.grid;
    if (policy.nx != grid.nx() || policy.np != grid.np())
        throw InvalidPolicy("simulate_singular_boundary: policy grid does not match");
    if (!(u_cap > 0.0))
        throw std::invalid_argument("simulate_singular_boundary: u_cap must be > 0");
    const double beta = problem.model.beta();
    const ResolvedSim rs = resolve(cfg, beta);
    const ExactStep step(problem.model, rs.dt);
    const double chunk = 0.5 * grid.hx();  // slice size for boundary tracking

    auto path = [&](PathRng& rng, double sign) -> double {
        double x = y0.x, p = y0.p, t = 0.0, rev = 0.0;
        bool absorbed = p <= 0.0;
        while (x > 1e-12 && t < rs.horizon && !absorbed) {
            // sell in slices while the trade flag holds, at rate u_cap
            double budget = u_cap * rs.dt;
            double sold = 0.0;
            while (budget > 0.0 && x > 1e-12) {
                const int i = grid.nearest_i(x);
                const int j = grid.nearest_j(p);
                if (policy.at(i, j) != Region::Trade) break;
                const double dz = std::min({chunk, budget, x});
                rev += std::exp(-beta * (t + sold / u_cap)) *
                       problem.impact.liquidation_value(dz, p);
                p = problem.impact.post_trade_price(dz, p).price;
                x -= dz;
                sold += dz;
                budget -= dz;
            }
            t += sold / u_cap;
            if (x <= 1e-12 || t >= rs.horizon) break;
            p = step.advance(p, sign * rng.next_normal(), absorbed);
            t += rs.dt;
        }
        return rev;
    };

    return run_paths(rs, y0, beta, path);
}

}  // namespace optex
