#include "optex/market.hpp"

#include <algorithm>
#include <cmath>

namespace optex {

namespace {

void check_common(double sigma, double beta) {
    if (!(sigma > 0.0)) throw std::invalid_argument("MarketModel: sigma must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("MarketModel: beta must be > 0");
}

}  // namespace

MarketModel MarketModel::gbm(double mu, double sigma, double beta) {
    check_common(sigma, beta);
    // Finiteness of the value function requires beta > mu for GBM.
    if (!(beta > mu))
        throw std::invalid_argument("MarketModel: GBM requires beta > mu");
    MarketModel m;
    m.kind_ = ProcessKind::GBM;
    m.mu_ = mu;
    m.sigma_ = sigma;
    m.beta_ = beta;
    return m;
}

MarketModel MarketModel::abm(double mu, double sigma, double beta) {
    check_common(sigma, beta);
    MarketModel m;
    m.kind_ = ProcessKind::ABM;
    m.mu_ = mu;
    m.sigma_ = sigma;
    m.beta_ = beta;
    return m;
}

MarketModel MarketModel::ou(double rate, double mean, double sigma, double beta) {
    check_common(sigma, beta);
    if (!(rate > 0.0)) throw std::invalid_argument("MarketModel: OU rate must be > 0");
    if (mean < 0.0) throw std::invalid_argument("MarketModel: OU mean must be >= 0");
    MarketModel m;
    m.kind_ = ProcessKind::OU;
    m.ou_rate_ = rate;
    m.ou_mean_ = mean;
    m.sigma_ = sigma;
    m.beta_ = beta;
    return m;
}

double MarketModel::drift(double p) const {
    switch (kind_) {
        case ProcessKind::GBM: return mu_ * p;
        case ProcessKind::ABM: return mu_;
        case ProcessKind::OU: return ou_rate_ * (ou_mean_ - p);
    }
    return 0.0;
}

double MarketModel::volatility(double p) const {
    switch (kind_) {
        case ProcessKind::GBM: return sigma_ * p;  // degenerate (0) at p = 0
        case ProcessKind::ABM: return sigma_;
        case ProcessKind::OU: return sigma_;
    }
    return 0.0;
}

BoundaryClass MarketModel::boundary_class() const {
    return kind_ == ProcessKind::GBM ? BoundaryClass::Natural : BoundaryClass::Absorbing;
}

PsiFunction PsiFunction::power_law(double exponent) {
    PsiFunction f;
    f.kind_ = Kind::PowerLaw;
    f.exponent_ = exponent;
    return f;
}

PsiFunction PsiFunction::numeric(std::vector<double> grid, std::vector<double> samples) {
    PsiFunction f;
    f.kind_ = Kind::Numeric;
    f.grid_ = std::move(grid);
    f.samples_ = std::move(samples);
    return f;
}

double PsiFunction::operator()(double p) const {
    if (kind_ == Kind::PowerLaw) return std::pow(p, exponent_);
    const auto& g = grid_;
    const auto& s = samples_;
    if (g.size() < 2) return s.empty() ? 0.0 : s.front();
    if (p <= g.front()) {
        const double slope = (s[1] - s[0]) / (g[1] - g[0]);
        return std::max(0.0, s[0] + slope * (p - g[0]));
    }
    if (p >= g.back()) {
        const std::size_t n = g.size();
        const double slope = (s[n - 1] - s[n - 2]) / (g[n - 1] - g[n - 2]);
        return s[n - 1] + slope * (p - g[n - 1]);
    }
    const auto it = std::upper_bound(g.begin(), g.end(), p);
    const std::size_t j = static_cast<std::size_t>(it - g.begin());
    const double t = (p - g[j - 1]) / (g[j] - g[j - 1]);
    return s[j - 1] + t * (s[j] - s[j - 1]);
}

PsiFunction psi(const MarketModel& model, std::span<const double> p_grid) {
    if (model.kind() == ProcessKind::GBM) {
        // sigma^2/2 nu^2 + (mu - sigma^2/2) nu - beta = 0, positive root.
        const double half_s2 = 0.5 * model.sigma() * model.sigma();
        const double b = model.mu() - half_s2;
        const double disc = b * b + 4.0 * half_s2 * model.beta();
        const double nu = (-b + std::sqrt(disc)) / (2.0 * half_s2);
        if (!(nu > 1.0))
            throw NoIncreasingRoot("psi: GBM eigenvalue quadratic has no root > 1");
        return PsiFunction::power_law(nu);
    }

    const std::size_t n = p_grid.size();
    if (n < 3) throw std::invalid_argument("psi: p_grid needs at least 3 points");
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (!(p_grid[j] > 0.0) || !(p_grid[j + 1] > p_grid[j]))
            throw std::invalid_argument("psi: p_grid must be strictly increasing and positive");
    }

    // Dirichlet problem u(p_min) = 0, u(p_max) = 1 for (beta - A)u = 0 with
    // the upwind stencil; the zero left value selects the increasing branch
    // appropriate for absorption at 0. Thomas solve on the interior.
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    std::vector<double> u(n, 0.0);
    u.front() = 0.0;
    u.back() = 1.0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double p = p_grid[j];
        const double hm = p_grid[j] - p_grid[j - 1];
        const double hp = p_grid[j + 1] - p_grid[j];
        const double s2 = model.volatility(p) * model.volatility(p);
        const double mu = model.drift(p);
        double down = s2 / (hm * (hm + hp));
        double up = s2 / (hp * (hm + hp));
        if (mu >= 0.0)
            up += mu / hp;
        else
            down += -mu / hm;
        sub[j] = -down;
        diag[j] = model.beta() + down + up;
        sup[j] = -up;
        rhs[j] = 0.0;
    }
    rhs[1] -= sub[1] * u.front();
    rhs[n - 2] -= sup[n - 2] * u.back();

    // forward elimination, interior indices 1..n-2
    for (std::size_t j = 2; j + 1 < n; ++j) {
        const double w = sub[j] / diag[j - 1];
        diag[j] -= w * sup[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    u[n - 2] = rhs[n - 2] / diag[n - 2];
    for (std::size_t j = n - 3; j >= 1; --j) {
        u[j] = (rhs[j] - sup[j] * u[j + 1]) / diag[j];
        if (j == 1) break;
    }

    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (!(u[j + 1] > u[j]))
            throw std::runtime_error("psi: numeric solution is not strictly increasing");
    }

    // normalize at the grid midpoint
    const double ref = u[n / 2];
    for (auto& v : u) v /= ref;

    return PsiFunction::numeric(std::vector<double>(p_grid.begin(), p_grid.end()), std::move(u));
}

}  // namespace optex
