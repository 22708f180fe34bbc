#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vrel/ast.hpp"

namespace vrel {

enum class TNormFamily { Lukasiewicz, Goedel, Product };

TNormFamily tnorm_from_string(const std::string& name);
std::string to_string(TNormFamily t);

enum class FuzzyOp { And, Or, Not, Implies };

/// Connective semantics on [0,1]. For `Not` the second argument is ignored.
///
/// Lukasiewicz: and = max(0, a+b-1), or = min(1, a+b),
///              implies = min(1, (1-a)+b), not = 1-a.
/// Goedel:      and = min, or = max, implies = (a<=b ? 1 : b), not = 1-a.
/// Product:     and = a*b, or = a+b-a*b, implies = (a<=b ? 1 : b/a), not = 1-a.
double eval_connective(TNormFamily t, FuzzyOp op, double a, double b = 0.0);

/// Universal-quantifier aggregation: the power mean with exponent p.
struct AggregationSpec {
    int p = -1;               // harmonic mean by default; p == 0 is invalid
    double epsilon = 1e-6;    // clamp floor applied to values before negative-p means

    void validate() const;
};

/// ((1/d) * sum x_i^p)^(1/p) over a nonempty list. For p < 0 the values are
/// clamped to [epsilon, 1] first; the result always lies between the min and
/// the max of the (clamped) inputs.
double mean_p(const std::vector<double>& values, const AggregationSpec& spec);

/// Truth values for ground atoms, keyed by atom_key().
using TruthAssignment = std::map<std::string, double>;

/// Supplies the instantiation set of a universally quantified subformula:
/// the closed bodies the mean_p aggregation ranges over. Must return a
/// nonempty list.
using ForallInstantiator = std::function<std::vector<FormulaPtr>(const Forall&)>;

/// Instantiates quantified variables with all ordered tuples of *distinct*
/// constants drawn from `domain` (singletons for one variable, ordered pairs
/// for two, and so on).
ForallInstantiator domain_instantiator(std::vector<std::string> domain);

/// Recursive fuzzy evaluation of a closed formula: atoms are looked up in
/// `atoms`, connectives follow `t`, universals aggregate with mean_p over
/// the bodies produced by `inst`. Throws if an atom is missing or a
/// universal has an empty instantiation set.
double eval_formula(const Formula& f, const TruthAssignment& atoms, TNormFamily t,
                    const AggregationSpec& agg, const ForallInstantiator& inst = nullptr);

/// How a clause set is folded into one satisfiability value.
struct KbAggregation {
    enum class Kind { TNormConjunction, PowerMean };
    Kind kind = Kind::PowerMean;
    TNormFamily tnorm = TNormFamily::Lukasiewicz;  // used by TNormConjunction
    AggregationSpec mean;                          // used by PowerMean

    static KbAggregation tnorm_conjunction(TNormFamily t) {
        return {Kind::TNormConjunction, t, {}};
    }
    static KbAggregation power_mean(const AggregationSpec& spec) {
        return {Kind::PowerMean, TNormFamily::Lukasiewicz, spec};
    }
};

/// Global satisfiability of a clause set from its per-clause truth values:
/// either the t-norm conjunction of all values or their power mean.
double kb_satisfiability(const std::vector<double>& clause_values, const KbAggregation& mode);

}  // namespace vrel
