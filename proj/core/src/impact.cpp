#include "optex/impact.hpp"

#include <cmath>

namespace optex {

ImpactModel ImpactModel::exponential(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ImpactModel: lambda must be >= 0");
    return ImpactModel(ImpactKind::Exponential, lambda);
}

ImpactModel ImpactModel::linear(double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ImpactModel: lambda must be >= 0");
    return ImpactModel(ImpactKind::Linear, lambda);
}

ImpactModel ImpactModel::none() { return ImpactModel(ImpactKind::None, 0.0); }

PostTradePrice ImpactModel::post_trade_price(double zeta, double p) const {
    switch (kind_) {
        case ImpactKind::Exponential:
            return {p * std::exp(-lambda_ * zeta), false};
        case ImpactKind::Linear: {
            const double raw = p - lambda_ * zeta;
            if (raw < 0.0) return {0.0, true};
            return {raw, false};
        }
        case ImpactKind::None:
            return {p, false};
    }
    return {p, false};
}

double ImpactModel::marginal_impact(double p) const {
    switch (kind_) {
        case ImpactKind::Exponential: return lambda_ * p;
        case ImpactKind::Linear: return lambda_;
        case ImpactKind::None: return 0.0;
    }
    return 0.0;
}

double ImpactModel::liquidation_value(double x, double p) const {
    if (x <= 0.0 || p <= 0.0) return 0.0;
    switch (kind_) {
        case ImpactKind::Exponential: {
            if (lambda_ == 0.0) return x * p;
            // (p / lambda)(1 - e^{-lambda x}); expm1 keeps small lambda x exact
            return -(p / lambda_) * std::expm1(-lambda_ * x);
        }
        case ImpactKind::Linear: {
            if (lambda_ == 0.0) return x * p;
            const double x_zero = p / lambda_;  // alpha reaches 0 here
            const double xe = std::min(x, x_zero);
            return xe * p - 0.5 * lambda_ * xe * xe;
        }
        case ImpactKind::None:
            return x * p;
    }
    return x * p;
}

State ImpactModel::impulse_transition(State y, double zeta) const {
    if (zeta < 0.0 || zeta > y.x)
        throw InvalidTradeSize("impulse_transition: zeta must lie in [0, x]");
    return {y.x - zeta, post_trade_price(zeta, y.p).price};
}

}  // namespace optex
