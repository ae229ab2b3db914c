#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optex/grid.hpp"
#include "optex/impact.hpp"

namespace optex {

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string details;
};

struct ValidateOptions {
    int nx = 200;
    int np = 200;
    long mc_paths = 20000;
    std::uint64_t seed = 1;
};

/// Bundled cross-validation battery: closed-form special cases for both
/// solvers, the k -> 0 ladder, impulse/singular agreement, and Monte Carlo
/// consistency checks.
std::vector<ValidationCheck> run_validation_battery(const ValidateOptions& opts);

/// Interior sup of |V - W| / W against the immediate-liquidation surface.
double sup_relative_error_vs_w(const ValueField& v, const Grid2D& grid,
                               const ImpactModel& impact);

/// Interior sup of |a - b| / (1 + |b|).
double sup_relative_diff(const ValueField& a, const ValueField& b, const Grid2D& grid);

}  // namespace optex
