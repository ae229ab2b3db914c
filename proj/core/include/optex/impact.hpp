#pragma once

#include <stdexcept>

#include "optex/types.hpp"

namespace optex {

enum class ImpactKind { Exponential, Linear, None };

/// Thrown by impulse_transition when the trade size leaves [0, x].
struct InvalidTradeSize : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Post-trade price together with a flag saying the raw map went negative
/// and was clamped to 0 (possible for the linear family only).
struct PostTradePrice {
    double price = 0.0;
    bool clamped = false;
};

/// Permanent price impact: the post-trade price map alpha(zeta, p), its
/// marginal rate gamma(p) = -d alpha/d zeta (0, p), and the value of
/// splitting the whole position into infinitesimal instantaneous trades.
class ImpactModel {
public:
    static ImpactModel exponential(double lambda);
    static ImpactModel linear(double lambda);
    static ImpactModel none();

    ImpactKind kind() const { return kind_; }
    double lambda() const { return lambda_; }

    PostTradePrice post_trade_price(double zeta, double p) const;

    /// alpha(zeta, p), clamp flag dropped.
    double alpha(double zeta, double p) const { return post_trade_price(zeta, p).price; }

    /// gamma(p): Exponential -> lambda p, Linear -> lambda, None -> 0.
    double marginal_impact(double p) const;

    /// W(x, p) = integral of alpha(s, p) ds over [0, x], with the linear
    /// integrand clamped at 0 past the point where alpha reaches 0.
    double liquidation_value(double x, double p) const;
    double liquidation_value(State y) const { return liquidation_value(y.x, y.p); }

    /// Gamma(y, zeta) = (x - zeta, alpha(zeta, p)); requires 0 <= zeta <= x.
    State impulse_transition(State y, double zeta) const;

private:
    ImpactModel(ImpactKind kind, double lambda) : kind_(kind), lambda_(lambda) {}

    ImpactKind kind_ = ImpactKind::None;
    double lambda_ = 0.0;
};

}  // namespace optex
