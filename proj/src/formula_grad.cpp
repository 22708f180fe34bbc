#include "vrel/formula_grad.hpp"

#include <stdexcept>

namespace vrel {

const Eigen::VectorXd& AtomFeatures::box(const std::string& c) const {
    auto it = boxes.find(c);
    if (it == boxes.end()) throw std::out_of_range("no box features for constant " + c);
    return it->second;
}

const Eigen::VectorXd& AtomFeatures::pair(const std::string& c1, const std::string& c2) const {
    auto it = pairs.find({c1, c2});
    if (it == pairs.end())
        throw std::out_of_range("no pair features for (" + c1 + "," + c2 + ")");
    return it->second;
}

namespace {

struct AtomSensitivity {
    const Atom* atom;
    double value;
    double weight;  // d(formula)/d(atom value), learnable atoms only
};

// Evaluates the formula and collects d(value)/d(atom) factors for every
// learnable (binary) atom. All connective partials are scalars, so the
// backward pass reduces to scaling the collected weights.
double walk(const Formula& f, const Theta& theta, const Signature& sig,
            const AtomFeatures& feats, TNormFamily t, std::vector<AtomSensitivity>& sens) {
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                for (const Term& term : node.terms)
                    if (term.is_variable())
                        throw std::invalid_argument("formula must be instantiated: free " +
                                                    term.name);
                if (sig.is_unary(node.predicate)) {
                    const Eigen::VectorXd& bf = feats.box(node.terms.at(0).name);
                    const auto n_classes = static_cast<Eigen::Index>(sig.unary_predicates().size());
                    return unary_grounding(bf.head(n_classes),
                                           sig.unary_index(node.predicate));
                }
                const Eigen::VectorXd& pf =
                    feats.pair(node.terms.at(0).name, node.terms.at(1).name);
                double v = ntn_forward(theta.predicates.at(node.predicate), pf);
                sens.push_back({&node, v, 1.0});
                return v;
            } else if constexpr (std::is_same_v<T, Not>) {
                std::size_t first = sens.size();
                double v = walk(*node.body, theta, sig, feats, t, sens);
                for (std::size_t i = first; i < sens.size(); ++i) sens[i].weight *= -1.0;
                return 1.0 - v;
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                std::size_t l0 = sens.size();
                double a = walk(*node.lhs, theta, sig, feats, t, sens);
                std::size_t r0 = sens.size();
                double b = walk(*node.rhs, theta, sig, feats, t, sens);
                FuzzyOp op = node.op == Connective::And   ? FuzzyOp::And
                             : node.op == Connective::Or  ? FuzzyOp::Or
                                                          : FuzzyOp::Implies;
                double value = eval_connective(t, op, a, b);
                double da = 0.0, db = 0.0;
                switch (t) {
                    case TNormFamily::Lukasiewicz:
                        // Saturated side of the clip gets subgradient zero.
                        if (op == FuzzyOp::And) {
                            if (a + b - 1.0 > 0.0) da = db = 1.0;
                        } else if (op == FuzzyOp::Or) {
                            if (a + b < 1.0) da = db = 1.0;
                        } else {  // implies
                            if (b < a) { da = -1.0; db = 1.0; }
                        }
                        break;
                    case TNormFamily::Goedel:
                        if (op == FuzzyOp::And) {
                            (a <= b ? da : db) = 1.0;
                        } else if (op == FuzzyOp::Or) {
                            (a >= b ? da : db) = 1.0;
                        } else {
                            if (a > b) db = 1.0;
                        }
                        break;
                    case TNormFamily::Product:
                        if (op == FuzzyOp::And) {
                            da = b;
                            db = a;
                        } else if (op == FuzzyOp::Or) {
                            da = 1.0 - b;
                            db = 1.0 - a;
                        } else {
                            if (a > b) {
                                da = -b / (a * a);
                                db = 1.0 / a;
                            }
                        }
                        break;
                }
                for (std::size_t i = l0; i < r0; ++i) sens[i].weight *= da;
                for (std::size_t i = r0; i < sens.size(); ++i) sens[i].weight *= db;
                return value;
            } else {
                throw std::invalid_argument(
                    "formula must be quantifier-free; instantiate universals first");
            }
        },
        f.node);
}

}  // namespace

double formula_value(const Formula& f, const Theta& theta, const Signature& sig,
                     const AtomFeatures& feats, TNormFamily t) {
    std::vector<AtomSensitivity> sens;
    return walk(f, theta, sig, feats, t, sens);
}

double formula_value_and_grad(const Formula& f, const Theta& theta, const Signature& sig,
                              const AtomFeatures& feats, TNormFamily t, GradientBundle& grad,
                              double upstream) {
    std::vector<AtomSensitivity> sens;
    double value = walk(f, theta, sig, feats, t, sens);
    for (const AtomSensitivity& s : sens) {
        double w = upstream * s.weight;
        if (w == 0.0) continue;
        const Atom& atom = *s.atom;
        ntn_backward_into(theta.predicates.at(atom.predicate),
                          feats.pair(atom.terms[0].name, atom.terms[1].name), w,
                          grad.predicates.at(atom.predicate));
    }
    return value;
}

}  // namespace vrel
