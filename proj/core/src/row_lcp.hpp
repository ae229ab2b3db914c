#pragma once

// Internal row solvers for the one-dimensional systems both solvers produce:
//   min{ (beta I - A) v , B v - c } = 0   on j = 1 .. np-1,
// with v[0] and v[np] held fixed by the boundary rules. A is the tridiagonal
// generator row; B is lower-bidiagonal (bd_j v_j - bl_j v_{j-1} - brhs_j),
// which covers both the impulse obstacle (bd=1, bl=0, brhs=g) and the
// singular gradient constraint. Policy iteration over the operator choice
// solves the row exactly in a few tridiagonal passes; callers verify the
// complementarity residual and fall back to projected sweeps if needed.

#include <cmath>
#include <cstring>
#include <vector>

#include "optex/grid.hpp"

namespace optex::detail {

struct RowScratch {
    std::vector<double> diag, upper, rhs;
    std::vector<char> policy, policy_prev;

    void resize(int np) {
        diag.assign(np + 1, 0.0);
        upper.assign(np + 1, 0.0);
        rhs.assign(np + 1, 0.0);
        policy.assign(np + 1, 0);
        policy_prev.assign(np + 1, 0);
    }
};

// Second operator of the row: bd_j v_j - bl_j v_{j-1} - brhs_j.
struct SecondOp {
    const double* bd = nullptr;
    const double* bl = nullptr;
    const double* brhs = nullptr;
};

class RowProblem {
public:
    RowProblem(const DiscreteGenerator& gen, double beta, int np)
        : gen_(gen), beta_(beta), np_(np) {}

    double linear_residual(const double* v, int j) const {
        return (beta_ + gen_.down(j) + gen_.up(j)) * v[j] - gen_.down(j) * v[j - 1] -
               gen_.up(j) * v[j + 1];
    }

    double second_residual(const SecondOp& op, const double* v, int j) const {
        return op.bd[j] * v[j] - op.bl[j] * v[j - 1] - op.brhs[j];
    }

    double row_residual(const SecondOp& op, const double* v) const {
        double worst = 0.0;
        for (int j = 1; j < np_; ++j) {
            const double r = std::min(linear_residual(v, j), second_residual(op, v, j)) /
                             (1.0 + std::fabs(v[j]));
            worst = std::max(worst, std::fabs(r));
        }
        return worst;
    }

    // Policy iteration; v[0] and v[np] are boundary data. Returns the number
    // of tridiagonal passes (capped; caller verifies the residual).
    int howard(const SecondOp& op, double* v, RowScratch& ws) const {
        constexpr int kMaxRounds = 64;
        auto choose = [&](char* pi) {
            for (int j = 1; j < np_; ++j)
                pi[j] = second_residual(op, v, j) < linear_residual(v, j) ? 1 : 0;
        };
        choose(ws.policy.data());
        int round = 0;
        for (; round < kMaxRounds; ++round) {
            // assemble and solve the policy's tridiagonal system
            auto& d = ws.diag;
            auto& u = ws.upper;
            auto& r = ws.rhs;
            // forward elimination with per-row lower coefficient
            for (int j = 1; j < np_; ++j) {
                double lo, dj, uj, rj;
                if (ws.policy[j]) {
                    lo = -op.bl[j];
                    dj = op.bd[j];
                    uj = 0.0;
                    rj = op.brhs[j];
                } else {
                    lo = -gen_.down(j);
                    dj = beta_ + gen_.down(j) + gen_.up(j);
                    uj = -gen_.up(j);
                    rj = 0.0;
                }
                if (j == 1) {
                    rj -= lo * v[0];
                    lo = 0.0;
                } else {
                    const double w = lo / d[j - 1];
                    dj -= w * u[j - 1];
                    rj -= w * r[j - 1];
                }
                if (j == np_ - 1) rj -= uj * v[np_];
                d[j] = dj;
                u[j] = uj;
                r[j] = rj;
            }
            v[np_ - 1] = r[np_ - 1] / d[np_ - 1];
            for (int j = np_ - 2; j >= 1; --j) v[j] = (r[j] - u[j] * v[j + 1]) / d[j];

            std::memcpy(ws.policy_prev.data(), ws.policy.data(), ws.policy.size());
            choose(ws.policy.data());
            if (std::memcmp(ws.policy.data(), ws.policy_prev.data(), ws.policy.size()) == 0) {
                ++round;
                break;
            }
        }
        return round;
    }

    int np() const { return np_; }
    double beta() const { return beta_; }
    const DiscreteGenerator& gen() const { return gen_; }

private:
    const DiscreteGenerator& gen_;
    double beta_;
    int np_;
};

}  // namespace optex::detail
