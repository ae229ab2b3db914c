#include "optex/grid.hpp"

#include <algorithm>

namespace optex {

Grid2D::Grid2D(double x_max, double p_max, int nx, int np)
    : x_max_(x_max), p_max_(p_max), nx_(nx), np_(np) {
    if (!(x_max > 0.0) || !(p_max > 0.0))
        throw std::invalid_argument("Grid2D: truncation bounds must be positive");
    if (nx < 16 || np < 16)
        throw std::invalid_argument("Grid2D: need at least 16 cells per axis");
    hx_ = x_max_ / nx_;
    hp_ = p_max_ / np_;
}

int Grid2D::nearest_i(double x) const {
    const int i = static_cast<int>(std::lround(x / hx_));
    return std::clamp(i, 0, nx_);
}

int Grid2D::nearest_j(double p) const {
    const int j = static_cast<int>(std::lround(p / hp_));
    return std::clamp(j, 0, np_);
}

std::vector<double> Grid2D::interior_p() const {
    std::vector<double> out;
    out.reserve(np_ - 1);
    for (int j = 1; j < np_; ++j) out.push_back(p(j));
    return out;
}

double ValueField::interp(const Grid2D& grid, double x, double p) const {
    const double fx = std::clamp(x / grid.hx(), 0.0, double(nx_));
    const double fp = std::clamp(p / grid.hp(), 0.0, double(np_));
    const int i0 = std::min(int(fx), nx_ - 1);
    const int j0 = std::min(int(fp), np_ - 1);
    const double tx = fx - i0;
    const double tp = fp - j0;
    const double v00 = (*this)(i0, j0), v01 = (*this)(i0, j0 + 1);
    const double v10 = (*this)(i0 + 1, j0), v11 = (*this)(i0 + 1, j0 + 1);
    return (1.0 - tx) * ((1.0 - tp) * v00 + tp * v01) + tx * ((1.0 - tp) * v10 + tp * v11);
}

void ValueField::zero_boundaries() {
    for (int j = 0; j <= np_; ++j) (*this)(0, j) = 0.0;
    for (int i = 0; i <= nx_; ++i) (*this)(i, 0) = 0.0;
}

double ValueField::sup_diff(const ValueField& other) const {
    double m = 0.0;
    for (std::size_t n = 0; n < v_.size(); ++n)
        m = std::max(m, std::fabs(v_[n] - other.v_[n]));
    return m;
}

DiscreteGenerator DiscreteGenerator::build(const MarketModel& model, const Grid2D& grid) {
    DiscreteGenerator g;
    const int np = grid.np();
    g.down_.assign(np + 1, 0.0);
    g.up_.assign(np + 1, 0.0);
    const double hp = grid.hp();
    for (int j = 1; j < np; ++j) {
        const double p = grid.p(j);
        const double s = model.volatility(p);
        const double diffusion = 0.5 * s * s / (hp * hp);
        const double mu = model.drift(p);
        g.down_[j] = diffusion + std::max(-mu, 0.0) / hp;
        g.up_[j] = diffusion + std::max(mu, 0.0) / hp;
    }
    return g;
}

void apply_upper_closure(ValueField& v, const Grid2D& grid, const ImpactModel& impact,
                         UpperClosure policy) {
    const int np = grid.np();
    if (policy == UpperClosure::DirichletW) {
        for (int i = 0; i <= grid.nx(); ++i)
            v(i, np) = impact.liquidation_value(grid.x(i), grid.p_max());
    } else {
        for (int i = 0; i <= grid.nx(); ++i)
            v(i, np) = 2.0 * v(i, np - 1) - v(i, np - 2);
    }
    v(0, np) = 0.0;
}

}  // namespace optex
