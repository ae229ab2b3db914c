#pragma once

#include <cstdint>
#include <stdexcept>

#include "optex/impulse.hpp"
#include "optex/singular.hpp"
#include "optex/types.hpp"

namespace optex {

struct InvalidPolicy : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SimConfig {
    long n_paths = 10000;
    double dt = 0.0;        // <= 0 resolves to 1e-3 / beta
    double horizon = 0.0;   // <= 0 resolves to 25 / beta
    std::uint64_t seed = 1;
    bool antithetic = false;
};

struct SimResult {
    double mean = 0.0;
    double half_width_95 = 0.0;
    long n_paths = 0;
    double tail_bound = 0.0;  // growth-bound scale of the discarded tail
    std::uint64_t seed = 0;
};

/// Run the solved impulse policy forward: exact transitions of the
/// unperturbed price between interventions, nearest-node policy lookup, and
/// repeated same-instant trades composed through the impact map.
SimResult simulate_impulse(const ImpulseProblem& problem, const ImpulsePolicy& policy,
                           State y0, const SimConfig& cfg);

/// Sell at constant speed u: Euler steps with the impact-adjusted drift
/// mu(p) - gamma(p) u and trapezoidal revenue accumulation until the
/// inventory runs out.
SimResult simulate_constant_rate(const MarketModel& model, const ImpactModel& impact,
                                 State y0, double u, const SimConfig& cfg);

/// Boundary-tracking strategy for a solved singular policy: inside the trade
/// region sell at rate u_cap (in small slices so the state stops at the free
/// boundary), elsewhere diffuse. The estimate is a u_cap-limited lower bound.
SimResult simulate_singular_boundary(const SingularProblem& problem,
                                     const SingularPolicy& policy, State y0,
                                     const SimConfig& cfg, double u_cap);

}  // namespace optex
