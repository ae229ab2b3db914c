#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace optex {

enum class ProcessKind { GBM, ABM, OU };

/// Whether the price process can reach 0 in finite time with positive
/// probability.
enum class BoundaryClass { Absorbing, Natural };

/// Thrown when the model family admits no increasing eigenfunction with
/// exponent > 1 (for GBM this signals a non-finite value function).
struct NoIncreasingRoot : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Coefficients of the unperturbed price diffusion dP = mu(P) dt + sigma(P) dB
/// together with the discount rate beta. Immutable after construction.
class MarketModel {
public:
    static MarketModel gbm(double mu, double sigma, double beta);
    static MarketModel abm(double mu, double sigma, double beta);
    static MarketModel ou(double rate, double mean, double sigma, double beta);

    ProcessKind kind() const { return kind_; }
    double mu() const { return mu_; }
    double sigma() const { return sigma_; }
    double beta() const { return beta_; }
    double ou_rate() const { return ou_rate_; }
    double ou_mean() const { return ou_mean_; }

    double drift(double p) const;
    double volatility(double p) const;
    BoundaryClass boundary_class() const;

private:
    MarketModel() = default;

    ProcessKind kind_ = ProcessKind::GBM;
    double mu_ = 0.0;       // GBM/ABM drift coefficient
    double sigma_ = 0.0;
    double beta_ = 0.0;
    double ou_rate_ = 0.0;  // OU mean-reversion rate
    double ou_mean_ = 0.0;  // OU long-run level
};

/// The increasing solution psi of A u = beta u, unique up to a positive
/// factor. GBM has the closed form p^nu; ABM and OU are tabulated.
class PsiFunction {
public:
    enum class Kind { PowerLaw, Numeric };

    static PsiFunction power_law(double exponent);
    static PsiFunction numeric(std::vector<double> grid, std::vector<double> samples);

    Kind kind() const { return kind_; }
    double exponent() const { return exponent_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& samples() const { return samples_; }

    /// Evaluate psi(p). Numeric tables interpolate linearly and continue
    /// with the edge slopes outside the tabulated range.
    double operator()(double p) const;

private:
    Kind kind_ = Kind::PowerLaw;
    double exponent_ = 1.0;
    std::vector<double> grid_;
    std::vector<double> samples_;
};

/// Build psi for the model on the given strictly increasing positive p-grid.
/// GBM: power law with the root nu > 1 of  sigma^2/2 nu(nu-1) + mu nu = beta.
/// ABM/OU: tridiagonal solve of the eigenvalue ODE on the grid, increasing
/// branch selected by pinning psi ~ 0 at the left edge, then normalized to
/// psi(p_ref) = 1 at the grid midpoint.
PsiFunction psi(const MarketModel& model, std::span<const double> p_grid);

}  // namespace optex
