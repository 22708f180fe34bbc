#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrel/fuzzy.hpp"
#include "vrel/kb.hpp"
#include "vrel/ntn.hpp"

namespace vrel {

struct TrainConfig {
    int epochs = 2500;
    double learning_rate = 0.01;
    double rmsprop_decay = 0.9;
    double rmsprop_epsilon = 1e-8;
    int p = -1;                    // loss aggregation exponent
    double agg_epsilon = 1e-6;     // clamp floor for negative-p means
    TNormFamily tnorm = TNormFamily::Lukasiewicz;
    int k = 5;                     // tensor layers
    double lambda = 1e-10;         // L2 regularization weight
    std::uint64_t seed = 0;
    int minibatch_clauses = 0;     // 0 means full batch
    // Power mean is the trained objective; the t-norm conjunction mode
    // exists to demonstrate why it is not.
    KbAggregation::Kind loss_mode = KbAggregation::Kind::PowerMean;

    void validate() const;
    AggregationSpec aggregation() const { return {p, agg_epsilon}; }
};

struct EpochRecord {
    int epoch = 0;
    double satisfiability = 0.0;  // aggregate over all clauses, pre-update
    double regularizer = 0.0;     // lambda * |Theta|^2
    double seconds = 0.0;
};

struct TrainTrace {
    std::vector<EpochRecord> epochs;

    void write_csv(const std::string& path) const;
};

/// Objective over a clause subset: aggregate of the per-clause truth values
/// (power mean, or t-norm conjunction in the pitfall mode) minus
/// lambda * |Theta|^2, together with its exact gradient.
struct LossResult {
    double objective = 0.0;        // satisfiability - regularizer
    double satisfiability = 0.0;
    double regularizer = 0.0;
    std::vector<double> clause_values;
};

LossResult loss_and_grad(const GroundedTheory& theory, const Theta& theta,
                         const TrainConfig& cfg, const std::vector<std::size_t>& clause_subset,
                         GradientBundle& grad);

/// Truth value of one clause: its atom's grounding (or the negation) for an
/// example, the mean_p aggregate of the instantiated bodies for a
/// constraint.
double clause_value(const TheoryClause& tc, const Theta& theta, const Signature& sig,
                    const AtomFeatures& feats, TNormFamily t, const AggregationSpec& agg);

/// RMSProp ascent on the best-satisfiability objective. Deterministic under
/// cfg.seed; aborts with a diagnostic if the objective turns non-finite.
std::pair<Theta, TrainTrace> train(const GroundedTheory& theory, const TrainConfig& cfg);

/// Like train() but starting from a caller-supplied Theta.
TrainTrace train_into(const GroundedTheory& theory, const TrainConfig& cfg, Theta& theta);

}  // namespace vrel
