#pragma once

#include <cstdint>
#include <string>

namespace vrel {

struct GradCheckOptions {
    std::uint64_t seed = 1;
    int ntn_instances = 100;      // direct checks of the tensor grounding
    int clause_instances = 20;    // checks of full clause objectives
    double fd_step = 1e-5;        // central-difference step
    double tolerance = 1e-4;      // max relative error allowed
    // Test fixture: flips the sign of the analytic d/db to prove the
    // comparison catches a broken backward pass.
    bool flip_b_gradient_sign = false;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_coordinate;
    int instances_checked = 0;
    double tolerance = 0.0;

    bool passed() const { return max_rel_error < tolerance; }
};

/// Compares the analytic gradients (of the tensor grounding alone and of
/// full clause objectives, regularizer included) against central finite
/// differences on seeded random instances. Instances falling within
/// 10 * fd_step of a Lukasiewicz clip or clamp boundary are redrawn, since
/// the difference quotient is meaningless across a kink.
GradCheckReport run_gradient_checks(const GradCheckOptions& opts);

}  // namespace vrel
