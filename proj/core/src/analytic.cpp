#include "optex/analytic.hpp"

#include <cmath>

namespace optex {

OracleResult no_impact_value(const MarketModel& model, State y, double k) {
    if (y.x < 0.0 || y.p < 0.0) throw std::invalid_argument("no_impact_value: state outside closed domain");
    if (k < 0.0) throw std::invalid_argument("no_impact_value: k must be >= 0");
    if (model.kind() == ProcessKind::GBM && k == 0.0) {
        // beta > mu is enforced by the model; immediate sale is optimal.
        return {y.x * y.p, OracleValidity::Exact, "GBM, k=0: U(x,p) = x p"};
    }
    return {0.0, OracleValidity::ConditionsNotMet,
            "no closed form; solve numerically with None impact"};
}

double constant_rate_revenue_raw(double x, double p, double mu, double beta,
                                 double lambda, double u) {
    const double a = mu - lambda * u - beta;
    const double z = a * x / u;
    if (std::fabs(z) < 1e-6) {
        // p u / a (e^z - 1) = p x (1 + z/2 + z^2/6 + ...)
        return p * x * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    }
    return p * u / a * std::expm1(z);
}

double constant_rate_revenue(const MarketModel& model, const ImpactModel& impact,
                             State y, double u) {
    if (model.kind() != ProcessKind::GBM)
        throw InvalidModel("constant_rate_revenue: closed form requires GBM");
    if (impact.kind() != ImpactKind::Exponential)
        throw InvalidModel("constant_rate_revenue: closed form requires exponential impact");
    if (!(u > 0.0)) throw InvalidModel("constant_rate_revenue: rate u must be > 0");
    if (y.x < 0.0) throw InvalidModel("constant_rate_revenue: x must be >= 0");
    if (y.x == 0.0) return 0.0;
    return constant_rate_revenue_raw(y.x, y.p, model.mu(), model.beta(), impact.lambda(), u);
}

double growth_bound(const PsiFunction& psi_fn, double C, State y) {
    if (!(C > 0.0)) throw std::invalid_argument("growth_bound: C must be > 0");
    if (y.x == 0.0) return 0.0;
    return C * y.x * psi_fn(y.p);
}

double calibrate_growth_constant(const ValueField& v, const Grid2D& grid,
                                 const PsiFunction& psi_fn) {
    double c = 0.0;
    for (int i = 1; i <= grid.nx(); ++i)
        for (int j = (grid.np() + 1) / 2; j <= grid.np(); ++j)
            c = std::max(c, v(i, j) / (grid.x(i) * psi_fn(grid.p(j))));
    return c;
}

}  // namespace optex
