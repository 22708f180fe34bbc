#include "vrel/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrel {

TNormFamily tnorm_from_string(const std::string& name) {
    if (name == "lukasiewicz") return TNormFamily::Lukasiewicz;
    if (name == "goedel") return TNormFamily::Goedel;
    if (name == "product") return TNormFamily::Product;
    throw std::invalid_argument("unknown t-norm family: " + name);
}

std::string to_string(TNormFamily t) {
    switch (t) {
        case TNormFamily::Lukasiewicz: return "lukasiewicz";
        case TNormFamily::Goedel: return "goedel";
        case TNormFamily::Product: return "product";
    }
    return "?";
}

double eval_connective(TNormFamily t, FuzzyOp op, double a, double b) {
    if (op == FuzzyOp::Not) return 1.0 - a;
    switch (t) {
        case TNormFamily::Lukasiewicz:
            switch (op) {
                case FuzzyOp::And: return std::max(0.0, a + b - 1.0);
                case FuzzyOp::Or: return std::min(1.0, a + b);
                case FuzzyOp::Implies: return std::min(1.0, (1.0 - a) + b);
                default: break;
            }
            break;
        case TNormFamily::Goedel:
            switch (op) {
                case FuzzyOp::And: return std::min(a, b);
                case FuzzyOp::Or: return std::max(a, b);
                case FuzzyOp::Implies: return a <= b ? 1.0 : b;
                default: break;
            }
            break;
        case TNormFamily::Product:
            switch (op) {
                case FuzzyOp::And: return a * b;
                case FuzzyOp::Or: return a + b - a * b;
                case FuzzyOp::Implies: return a <= b ? 1.0 : b / a;
                default: break;
            }
            break;
    }
    throw std::logic_error("unreachable connective");
}

void AggregationSpec::validate() const {
    if (p == 0) throw std::invalid_argument("aggregation exponent p must be nonzero");
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("aggregation epsilon must lie in (0,1)");
}

double mean_p(const std::vector<double>& values, const AggregationSpec& spec) {
    spec.validate();
    if (values.empty()) throw std::invalid_argument("mean_p over an empty list");
    const double p = static_cast<double>(spec.p);
    double acc = 0.0;
    for (double x : values) {
        if (spec.p < 0) x = std::clamp(x, spec.epsilon, 1.0);
        acc += std::pow(x, p);
    }
    acc /= static_cast<double>(values.size());
    return std::pow(acc, 1.0 / p);
}

ForallInstantiator domain_instantiator(std::vector<std::string> domain) {
    return [domain = std::move(domain)](const Forall& q) {
        const std::size_t v = q.variables.size();
        std::vector<FormulaPtr> bodies;
        std::vector<std::size_t> pick(v, 0);
        std::vector<bool> used(domain.size(), false);
        // Enumerate ordered tuples of distinct constants.
        std::function<void(std::size_t)> rec = [&](std::size_t depth) {
            if (depth == v) {
                std::unordered_map<std::string, std::string> bind;
                for (std::size_t i = 0; i < v; ++i) bind[q.variables[i]] = domain[pick[i]];
                bodies.push_back(
                    instantiate(Formula{Forall{q.variables, q.body}}, bind));
                return;
            }
            for (std::size_t i = 0; i < domain.size(); ++i) {
                if (used[i]) continue;
                used[i] = true;
                pick[depth] = i;
                rec(depth + 1);
                used[i] = false;
            }
        };
        rec(0);
        return bodies;
    };
}

double eval_formula(const Formula& f, const TruthAssignment& atoms, TNormFamily t,
                    const AggregationSpec& agg, const ForallInstantiator& inst) {
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                auto it = atoms.find(atom_key(node));
                if (it == atoms.end())
                    throw std::out_of_range("no truth value for atom " + atom_key(node));
                return it->second;
            } else if constexpr (std::is_same_v<T, Not>) {
                return 1.0 - eval_formula(*node.body, atoms, t, agg, inst);
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                double a = eval_formula(*node.lhs, atoms, t, agg, inst);
                double b = eval_formula(*node.rhs, atoms, t, agg, inst);
                FuzzyOp op = node.op == Connective::And   ? FuzzyOp::And
                             : node.op == Connective::Or  ? FuzzyOp::Or
                                                          : FuzzyOp::Implies;
                return eval_connective(t, op, a, b);
            } else {
                if (!inst)
                    throw std::invalid_argument("universal quantifier without an instantiator");
                std::vector<FormulaPtr> bodies = inst(node);
                if (bodies.empty())
                    throw std::invalid_argument("universal quantifier over an empty set");
                std::vector<double> vals;
                vals.reserve(bodies.size());
                for (const FormulaPtr& b : bodies)
                    vals.push_back(eval_formula(*b, atoms, t, agg, inst));
                return mean_p(vals, agg);
            }
        },
        f.node);
}

double kb_satisfiability(const std::vector<double>& clause_values, const KbAggregation& mode) {
    if (clause_values.empty())
        throw std::invalid_argument("kb_satisfiability over an empty clause set");
    if (mode.kind == KbAggregation::Kind::PowerMean) return mean_p(clause_values, mode.mean);
    double acc = clause_values.front();
    for (std::size_t i = 1; i < clause_values.size(); ++i)
        acc = eval_connective(mode.tnorm, FuzzyOp::And, acc, clause_values[i]);
    return acc;
}

}  // namespace vrel
