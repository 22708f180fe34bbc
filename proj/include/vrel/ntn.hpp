#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrel/ast.hpp"

namespace vrel {

/// Learnable grounding of one binary predicate:
///   value(v) = sigmoid(u . tanh(z)),  z_i = v' W_i v + (V v)_i + b_i
/// with v the feature vector of the argument tuple (the stacked per-object
/// vectors, plus the joint block when pair features are used).
struct PredicateParams {
    Eigen::VectorXd u;                // k
    std::vector<Eigen::MatrixXd> W;   // k slices, each input_dim x input_dim
    Eigen::MatrixXd V;                // k x input_dim
    Eigen::VectorXd b;                // k
    int arity = 2;
    int input_dim = 0;

    int k() const { return static_cast<int>(u.size()); }
    std::size_t parameter_count() const;
    void check_shapes() const;
};

/// Gradient (or accumulator) with the same shapes as PredicateParams.
struct PredicateGrad {
    Eigen::VectorXd u;
    std::vector<Eigen::MatrixXd> W;
    Eigen::MatrixXd V;
    Eigen::VectorXd b;

    static PredicateGrad zeros_like(const PredicateParams& p);
    void add_scaled(const PredicateGrad& other, double scale);
    void setZero();
};

/// All learnable parameters: one PredicateParams per binary predicate.
/// Unary predicates are rule-based indicators and carry no parameters.
struct Theta {
    std::map<std::string, PredicateParams> predicates;
    int k = 5;
    double lambda = 1e-10;

    double squared_norm() const;
    std::size_t parameter_count() const;
};

struct GradientBundle {
    std::map<std::string, PredicateGrad> predicates;

    static GradientBundle zeros_like(const Theta& theta);
    void setZero();
};

/// Fresh parameters for every binary predicate, every entry i.i.d.
/// normal(0, 0.1). Draw order is fixed (signature order; per predicate W
/// slices row-major, then V, then b, then u), so a seed pins the whole
/// initialization. `input_dim` is the length of the pair feature vector.
Theta init_theta(const Signature& sig, int k, int input_dim, double lambda,
                 std::uint64_t seed);

/// sigmoid(u . tanh(v' W v + V v + b)); strictly inside (0,1).
double ntn_forward(const PredicateParams& p, const Eigen::VectorXd& v);

/// Accumulates upstream * d(ntn_forward)/d(params) into `grad`.
void ntn_backward_into(const PredicateParams& p, const Eigen::VectorXd& v, double upstream,
                       PredicateGrad& grad);

/// Convenience form returning a fresh gradient.
PredicateGrad ntn_backward(const PredicateParams& p, const Eigen::VectorXd& v, double upstream);

/// Rule-based unary grounding: 1 iff class_index is the argmax of the score
/// block, ties broken by the lowest index.
double unary_grounding(const Eigen::VectorXd& scores, std::size_t class_index);

std::size_t argmax_lowest(const Eigen::VectorXd& scores);

/// Model persistence. The file records the signature, k, the pair input
/// dimension and every parameter array; numbers round-trip bit-exactly.
void save_model(const std::string& path, const Signature& sig, const Theta& theta,
                int input_dim);

struct LoadedModel {
    Signature signature;
    Theta theta;
    int input_dim = 0;
};

LoadedModel load_model(const std::string& path);

}  // namespace vrel
