#pragma once

#include <stdexcept>
#include <string>

#include "optex/grid.hpp"
#include "optex/impact.hpp"
#include "optex/market.hpp"
#include "optex/types.hpp"

namespace optex {

/// Thrown when a closed-form routine is called outside the model family it
/// covers.
struct InvalidModel : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class OracleValidity { Exact, ConditionsNotMet };

struct OracleResult {
    double value = 0.0;
    OracleValidity validity = OracleValidity::ConditionsNotMet;
    std::string condition_note;
};

/// Value without price impact. Closed form only for GBM with k = 0, where
/// immediate sale is optimal and the value is x p; anything else has to be
/// solved numerically with the None impact model.
OracleResult no_impact_value(const MarketModel& model, State y, double k);

/// Expected discounted revenue of selling at constant speed u under GBM with
/// exponential impact:  p u / (mu - lambda u - beta) (e^{(mu-lambda u-beta)x/u} - 1).
/// Requires GBM with beta > mu, exponential impact and u > 0.
double constant_rate_revenue(const MarketModel& model, const ImpactModel& impact,
                             State y, double u);

/// Unvalidated scalar core of the constant-rate formula; switches to a series
/// around the removable singularity mu - lambda u - beta = 0.
double constant_rate_revenue_raw(double x, double p, double mu, double beta,
                                 double lambda, double u);

/// Upper-bound certificate C x psi(p).
double growth_bound(const PsiFunction& psi_fn, double C, State y);

/// Empirical growth constant: max of V / (x psi(p)) over the upper half of
/// the price range of a (typically coarse) solved field. The growth bound
/// concerns the large-p tail; near p = 0 the ratio is unbounded for
/// power-law psi and carries no information.
double calibrate_growth_constant(const ValueField& v, const Grid2D& grid,
                                 const PsiFunction& psi_fn);

}  // namespace optex
