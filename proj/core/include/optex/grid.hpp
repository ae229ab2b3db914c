#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "optex/impact.hpp"
#include "optex/market.hpp"
#include "optex/types.hpp"

namespace optex {

/// Rule for closing the scheme at the truncation boundary p = p_max.
enum class UpperClosure { DirichletW, LinearExtrapolation };

/// Uniform rectangular grid on [0, x_max] x [0, p_max] with nodes
/// (i hx, j hp), 0 <= i <= nx, 0 <= j <= np. The p = 0 column always carries
/// the absorbing value 0.
class Grid2D {
public:
    Grid2D(double x_max, double p_max, int nx, int np);

    double x_max() const { return x_max_; }
    double p_max() const { return p_max_; }
    int nx() const { return nx_; }
    int np() const { return np_; }
    double hx() const { return hx_; }
    double hp() const { return hp_; }

    double x(int i) const { return i * hx_; }
    double p(int j) const { return j * hp_; }
    std::size_t n_nodes() const { return std::size_t(nx_ + 1) * std::size_t(np_ + 1); }

    int nearest_i(double x) const;
    int nearest_j(double p) const;

    /// Interior p-samples p_1 .. p_{np-1}, handy for psi construction.
    std::vector<double> interior_p() const;

private:
    double x_max_, p_max_;
    int nx_, np_;
    double hx_, hp_;
};

/// Matrix of values over grid nodes, row-major in x then p:
/// index(i, j) = i (np+1) + j.
class ValueField {
public:
    explicit ValueField(const Grid2D& grid, double fill = 0.0)
        : nx_(grid.nx()), np_(grid.np()), v_(grid.n_nodes(), fill) {}

    double& operator()(int i, int j) { return v_[std::size_t(i) * (np_ + 1) + j]; }
    double operator()(int i, int j) const { return v_[std::size_t(i) * (np_ + 1) + j]; }

    int nx() const { return nx_; }
    int np() const { return np_; }
    std::size_t size() const { return v_.size(); }
    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

    bool same_shape(const ValueField& other) const {
        return nx_ == other.nx_ && np_ == other.np_;
    }

    /// Bilinear interpolation at (x, p), clamped to the grid box.
    double interp(const Grid2D& grid, double x, double p) const;

    /// Zero the x = 0 row and p = 0 column (value 0 on the boundary).
    void zero_boundaries();

    double sup_diff(const ValueField& other) const;

private:
    int nx_, np_;
    std::vector<double> v_;
};

/// Discretization of A = mu(p) d_p + sigma(p)^2/2 d_pp on interior p-nodes:
/// central second difference plus drift upwinded on the sign of mu(p), so
/// both off-diagonal weights stay nonnegative.
class DiscreteGenerator {
public:
    static DiscreteGenerator build(const MarketModel& model, const Grid2D& grid);

    /// A applied to row i of the field at interior node j.
    double apply(const ValueField& v, int i, int j) const {
        return down_[j] * v(i, j - 1) - (down_[j] + up_[j]) * v(i, j) + up_[j] * v(i, j + 1);
    }

    double down(int j) const { return down_[j]; }
    double up(int j) const { return up_[j]; }
    int np() const { return static_cast<int>(down_.size()) - 1; }

private:
    std::vector<double> down_, up_;
};

/// Fill the j = np row of a field according to the closure policy.
/// DirichletW pins the liquidation value W(x_i, p_max); LinearExtrapolation
/// continues the field with zero second difference in p.
void apply_upper_closure(ValueField& v, const Grid2D& grid, const ImpactModel& impact,
                         UpperClosure policy);

}  // namespace optex
