#pragma once

#include "vrel/config.hpp"

namespace vrel {

// Exit codes shared by the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Builds the knowledge base from the training annotations, trains the
/// predicate groundings and writes the checkpoint, the per-epoch trace CSV
/// and the effective-config echo into out_dir.
int cmd_train(const RunConfig& cfg);

/// Loads a checkpoint, scores the test split and writes metrics.csv (one
/// row per task and K) plus a ranked prediction dump per image.
int cmd_evaluate(const RunConfig& cfg);

/// Loads a checkpoint and writes the ranked predictions of the test split
/// as JSON lines.
int cmd_predict(const RunConfig& cfg);

/// Runs the finite-difference gradient suite; exit 0 iff the worst relative
/// error stays under 1e-4.
int cmd_check_grads(const RunConfig& cfg);

/// Prints the knowledge-base satisfiability of constructed clause sets
/// under the three t-norm conjunctions and the harmonic mean, reproducing
/// the failure modes the mean-based loss avoids.
int cmd_demo_pitfalls(const RunConfig& cfg);

}  // namespace vrel
