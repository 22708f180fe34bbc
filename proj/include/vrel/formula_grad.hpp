#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <utility>

#include "vrel/ast.hpp"
#include "vrel/fuzzy.hpp"
#include "vrel/ntn.hpp"

namespace vrel {

/// Feature vectors the grounding of ground atoms is computed from:
/// per-constant box features (score block + geometry) for unary atoms and
/// per-ordered-pair joint features for binary atoms.
struct AtomFeatures {
    std::unordered_map<std::string, Eigen::VectorXd> boxes;  // constant -> box feature vector

    struct PairHash {
        std::size_t operator()(const std::pair<std::string, std::string>& p) const {
            return std::hash<std::string>()(p.first) * 1000003u ^ std::hash<std::string>()(p.second);
        }
    };
    std::unordered_map<std::pair<std::string, std::string>, Eigen::VectorXd, PairHash> pairs;

    const Eigen::VectorXd& box(const std::string& c) const;
    const Eigen::VectorXd& pair(const std::string& c1, const std::string& c2) const;
    bool has_pair(const std::string& c1, const std::string& c2) const {
        return pairs.count({c1, c2}) > 0;
    }
};

/// Forward value of a closed, quantifier-free formula with atoms grounded
/// by the neural tensor predicates (binary) and the one-hot indicator rule
/// (unary).
double formula_value(const Formula& f, const Theta& theta, const Signature& sig,
                     const AtomFeatures& feats, TNormFamily t);

/// Forward value plus exact parameter gradient, accumulated into `grad`
/// scaled by `upstream`. At a clipped min/max of the Lukasiewicz family the
/// subgradient on the clipped side is zero.
double formula_value_and_grad(const Formula& f, const Theta& theta, const Signature& sig,
                              const AtomFeatures& feats, TNormFamily t, GradientBundle& grad,
                              double upstream = 1.0);

}  // namespace vrel
