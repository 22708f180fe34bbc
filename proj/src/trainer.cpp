#include "vrel/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "vrel/formula_grad.hpp"
#include "vrel/rng.hpp"

namespace vrel {

void TrainConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
    if (!(rmsprop_decay > 0) || !(rmsprop_decay < 1))
        throw std::invalid_argument("rmsprop decay must lie in (0,1)");
    if (!(rmsprop_epsilon > 0)) throw std::invalid_argument("rmsprop epsilon must be positive");
    if (p == 0) throw std::invalid_argument("aggregation exponent p must be nonzero");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    if (minibatch_clauses < 0) throw std::invalid_argument("minibatch size must be >= 0");
    if (p >= 1)
        std::cerr << "warning: aggregation exponent p=" << p
                  << " >= 1 overweights easy clauses; negative p is recommended\n";
}

void TrainTrace::write_csv(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open trace file: " + path);
    os << "epoch,satisfiability,regularizer,seconds\n";
    char buf[160];
    for (const EpochRecord& r : epochs) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.6f\n", r.epoch, r.satisfiability,
                      r.regularizer, r.seconds);
        os << buf;
    }
}

double clause_value(const TheoryClause& tc, const Theta& theta, const Signature& sig,
                    const AtomFeatures& feats, TNormFamily t, const AggregationSpec& agg) {
    if (tc.clause.kind != ClauseKind::Constraint)
        return formula_value(*tc.clause.formula, theta, sig, feats, t);
    std::vector<double> vals;
    vals.reserve(tc.instantiations.size());
    for (const FormulaPtr& body : tc.instantiations)
        vals.push_back(formula_value(*body, theta, sig, feats, t));
    return mean_p(vals, agg);
}

namespace {

// d(mean_p)/d(x_i) = (1/d) * x_i^(p-1) * S^((1-p)/p) with S the inner
// average; zero where the epsilon clamp is active.
std::vector<double> mean_p_partials(const std::vector<double>& values,
                                    const AggregationSpec& agg) {
    const double p = static_cast<double>(agg.p);
    const double d = static_cast<double>(values.size());
    double S = 0.0;
    std::vector<double> clamped(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        double x = values[i];
        if (agg.p < 0) x = std::clamp(x, agg.epsilon, 1.0);
        clamped[i] = x;
        S += std::pow(x, p);
    }
    S /= d;
    std::vector<double> out(values.size());
    const double outer = std::pow(S, (1.0 - p) / p);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (agg.p < 0 && values[i] < agg.epsilon) {
            out[i] = 0.0;  // clamped: flat in the raw value
            continue;
        }
        out[i] = outer * std::pow(clamped[i], p - 1.0) / d;
    }
    return out;
}

// Backpropagates one clause's upstream into the parameter gradient.
void clause_backward(const TheoryClause& tc, const Theta& theta, const Signature& sig,
                     const AtomFeatures& feats, TNormFamily t, const AggregationSpec& agg,
                     double upstream, GradientBundle& grad) {
    if (upstream == 0.0) return;
    if (tc.clause.kind != ClauseKind::Constraint) {
        formula_value_and_grad(*tc.clause.formula, theta, sig, feats, t, grad, upstream);
        return;
    }
    std::vector<double> vals;
    vals.reserve(tc.instantiations.size());
    for (const FormulaPtr& body : tc.instantiations)
        vals.push_back(formula_value(*body, theta, sig, feats, t));
    std::vector<double> partials = mean_p_partials(vals, agg);
    for (std::size_t i = 0; i < tc.instantiations.size(); ++i)
        if (partials[i] != 0.0)
            formula_value_and_grad(*tc.instantiations[i], theta, sig, feats, t, grad,
                                   upstream * partials[i]);
}

void add_regularizer_gradient(const Theta& theta, double lambda, GradientBundle& grad) {
    if (lambda == 0.0) return;
    for (const auto& [name, p] : theta.predicates) {
        PredicateGrad& g = grad.predicates.at(name);
        g.u -= 2.0 * lambda * p.u;
        g.b -= 2.0 * lambda * p.b;
        g.V -= 2.0 * lambda * p.V;
        for (std::size_t i = 0; i < p.W.size(); ++i) g.W[i] -= 2.0 * lambda * p.W[i];
    }
}

}  // namespace

LossResult loss_and_grad(const GroundedTheory& theory, const Theta& theta,
                         const TrainConfig& cfg, const std::vector<std::size_t>& clause_subset,
                         GradientBundle& grad) {
    if (clause_subset.empty()) throw std::invalid_argument("loss over an empty clause subset");
    const AggregationSpec agg = cfg.aggregation();
    LossResult res;
    res.clause_values.reserve(clause_subset.size());
    for (std::size_t idx : clause_subset)
        res.clause_values.push_back(clause_value(theory.clauses[idx], theta, theory.signature,
                                                 theory.features, cfg.tnorm, agg));

    std::vector<double> upstreams(clause_subset.size(), 0.0);
    if (cfg.loss_mode == KbAggregation::Kind::PowerMean) {
        res.satisfiability = mean_p(res.clause_values, agg);
        upstreams = mean_p_partials(res.clause_values, agg);
    } else {
        // n-ary Lukasiewicz conjunction: max(0, sum - (n-1)). When clamped
        // at zero every clause gets subgradient zero.
        double s = std::accumulate(res.clause_values.begin(), res.clause_values.end(), 0.0);
        double sat = s - static_cast<double>(res.clause_values.size() - 1);
        res.satisfiability = std::max(0.0, sat);
        if (sat > 0.0) std::fill(upstreams.begin(), upstreams.end(), 1.0);
    }
    for (std::size_t i = 0; i < clause_subset.size(); ++i)
        clause_backward(theory.clauses[clause_subset[i]], theta, theory.signature,
                        theory.features, cfg.tnorm, agg, upstreams[i], grad);

    res.regularizer = cfg.lambda * theta.squared_norm();
    add_regularizer_gradient(theta, cfg.lambda, grad);
    res.objective = res.satisfiability - res.regularizer;
    return res;
}

namespace {

struct RmsProp {
    GradientBundle accum;
    double decay;
    double eps;
    double lr;

    RmsProp(const Theta& theta, const TrainConfig& cfg)
        : accum(GradientBundle::zeros_like(theta)),
          decay(cfg.rmsprop_decay),
          eps(cfg.rmsprop_epsilon),
          lr(cfg.learning_rate) {}

    // Ascent: s <- decay*s + (1-decay)*g^2; theta <- theta + lr*g/sqrt(s+eps).
    void step(Theta& theta, const GradientBundle& grad) {
        auto update = [&](auto& param, auto& s, const auto& g) {
            s.array() = decay * s.array() + (1.0 - decay) * g.array().square();
            param.array() += lr * g.array() / (s.array() + eps).sqrt();
        };
        for (auto& [name, p] : theta.predicates) {
            PredicateGrad& s = accum.predicates.at(name);
            const PredicateGrad& g = grad.predicates.at(name);
            update(p.u, s.u, g.u);
            update(p.b, s.b, g.b);
            update(p.V, s.V, g.V);
            for (std::size_t i = 0; i < p.W.size(); ++i) update(p.W[i], s.W[i], g.W[i]);
        }
    }
};

}  // namespace

TrainTrace train_into(const GroundedTheory& theory, const TrainConfig& cfg, Theta& theta) {
    cfg.validate();
    if (theory.clauses.empty()) throw std::invalid_argument("cannot train on an empty theory");

    RmsProp opt(theta, cfg);
    GradientBundle grad = GradientBundle::zeros_like(theta);
    TrainTrace trace;
    trace.epochs.reserve(cfg.epochs);

    std::vector<std::size_t> all(theory.clauses.size());
    std::iota(all.begin(), all.end(), 0);
    auto shuffle_rng = substream(cfg.seed, "train-shuffle");

    const auto t0 = std::chrono::steady_clock::now();
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        EpochRecord rec;
        rec.epoch = epoch;
        if (cfg.minibatch_clauses <= 0 ||
            cfg.minibatch_clauses >= static_cast<int>(all.size())) {
            grad.setZero();
            LossResult res = loss_and_grad(theory, theta, cfg, all, grad);
            if (!std::isfinite(res.objective))
                throw std::runtime_error("non-finite objective at epoch " +
                                         std::to_string(epoch));
            opt.step(theta, grad);
            rec.satisfiability = res.satisfiability;
            rec.regularizer = res.regularizer;
        } else {
            std::shuffle(all.begin(), all.end(), shuffle_rng);
            for (std::size_t start = 0; start < all.size();
                 start += static_cast<std::size_t>(cfg.minibatch_clauses)) {
                std::size_t end =
                    std::min(all.size(), start + static_cast<std::size_t>(cfg.minibatch_clauses));
                std::vector<std::size_t> batch(all.begin() + start, all.begin() + end);
                grad.setZero();
                LossResult res = loss_and_grad(theory, theta, cfg, batch, grad);
                if (!std::isfinite(res.objective))
                    throw std::runtime_error("non-finite objective at epoch " +
                                             std::to_string(epoch));
                opt.step(theta, grad);
            }
            // Full-theory satisfiability for the trace.
            std::vector<std::size_t> ordered(theory.clauses.size());
            std::iota(ordered.begin(), ordered.end(), 0);
            std::vector<double> vals;
            vals.reserve(ordered.size());
            const AggregationSpec agg = cfg.aggregation();
            for (std::size_t idx : ordered)
                vals.push_back(clause_value(theory.clauses[idx], theta, theory.signature,
                                            theory.features, cfg.tnorm, agg));
            rec.satisfiability =
                cfg.loss_mode == KbAggregation::Kind::PowerMean
                    ? mean_p(vals, agg)
                    : kb_satisfiability(vals, KbAggregation::tnorm_conjunction(cfg.tnorm));
            rec.regularizer = cfg.lambda * theta.squared_norm();
        }
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        trace.epochs.push_back(rec);
    }
    return trace;
}

std::pair<Theta, TrainTrace> train(const GroundedTheory& theory, const TrainConfig& cfg) {
    Theta theta = init_theta(theory.signature, cfg.k, theory.pair_input_dim, cfg.lambda,
                             derive_seed(cfg.seed, "theta-init"));
    TrainTrace trace = train_into(theory, cfg, theta);
    return {std::move(theta), std::move(trace)};
}

}  // namespace vrel
