#include "vrel/gradcheck.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "vrel/formula_grad.hpp"
#include "vrel/fuzzy.hpp"
#include "vrel/kb.hpp"
#include "vrel/ntn.hpp"
#include "vrel/rng.hpp"
#include "vrel/trainer.hpp"

namespace vrel {

namespace {

struct Coord {
    double* value;
    std::string name;
};

std::vector<Coord> parameter_coords(Theta& theta) {
    std::vector<Coord> coords;
    for (auto& [pred, p] : theta.predicates) {
        for (std::size_t s = 0; s < p.W.size(); ++s)
            for (Eigen::Index r = 0; r < p.W[s].rows(); ++r)
                for (Eigen::Index c = 0; c < p.W[s].cols(); ++c)
                    coords.push_back({&p.W[s](r, c), pred + ".W[" + std::to_string(s) + "](" +
                                                         std::to_string(r) + "," +
                                                         std::to_string(c) + ")"});
        for (Eigen::Index r = 0; r < p.V.rows(); ++r)
            for (Eigen::Index c = 0; c < p.V.cols(); ++c)
                coords.push_back({&p.V(r, c), pred + ".V(" + std::to_string(r) + "," +
                                                  std::to_string(c) + ")"});
        for (Eigen::Index i = 0; i < p.b.size(); ++i)
            coords.push_back({&p.b(i), pred + ".b(" + std::to_string(i) + ")"});
        for (Eigen::Index i = 0; i < p.u.size(); ++i)
            coords.push_back({&p.u(i), pred + ".u(" + std::to_string(i) + ")"});
    }
    return coords;
}

const double* grad_coord(const GradientBundle& g, const Theta& theta, const Coord& coord) {
    // Coordinates were built over theta; mirror the offsets into the bundle.
    for (const auto& [pred, p] : theta.predicates) {
        const PredicateGrad& pg = g.predicates.at(pred);
        for (std::size_t s = 0; s < p.W.size(); ++s) {
            std::ptrdiff_t off = coord.value - p.W[s].data();
            if (off >= 0 && off < p.W[s].size()) return pg.W[s].data() + off;
        }
        std::ptrdiff_t off = coord.value - p.V.data();
        if (off >= 0 && off < p.V.size()) return pg.V.data() + off;
        off = coord.value - p.b.data();
        if (off >= 0 && off < p.b.size()) return pg.b.data() + off;
        off = coord.value - p.u.data();
        if (off >= 0 && off < p.u.size()) return pg.u.data() + off;
    }
    throw std::logic_error("coordinate not found in gradient bundle");
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

PredicateParams random_params(int k, int input_dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 0.3);
    PredicateParams p;
    p.arity = 2;
    p.input_dim = input_dim;
    p.u.resize(k);
    p.b.resize(k);
    p.V.resize(k, input_dim);
    for (int i = 0; i < k; ++i) {
        Eigen::MatrixXd w(input_dim, input_dim);
        for (int r = 0; r < input_dim; ++r)
            for (int c = 0; c < input_dim; ++c) w(r, c) = normal(rng);
        p.W.push_back(std::move(w));
        p.b(i) = normal(rng);
        p.u(i) = normal(rng);
        for (int c = 0; c < input_dim; ++c) p.V(i, c) = normal(rng);
    }
    return p;
}

void track(GradCheckReport& report, double rel, const std::string& name) {
    if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_coordinate = name;
    }
}

void check_ntn_instance(int k, int input_dim, std::mt19937_64& rng,
                        const GradCheckOptions& opts, GradCheckReport& report) {
    PredicateParams p = random_params(k, input_dim, rng);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd v(input_dim);
    for (int i = 0; i < input_dim; ++i) v(i) = unit(rng);

    PredicateGrad analytic = ntn_backward(p, v, 1.0);
    if (opts.flip_b_gradient_sign) analytic.b = -analytic.b;

    const double h = opts.fd_step;
    auto fd_check = [&](double* coord, double analytic_value, const std::string& name) {
        const double saved = *coord;
        *coord = saved + h;
        const double up = ntn_forward(p, v);
        *coord = saved - h;
        const double dn = ntn_forward(p, v);
        *coord = saved;
        track(report, relative_error(analytic_value, (up - dn) / (2.0 * h)), name);
    };
    for (int s = 0; s < k; ++s)
        for (int r = 0; r < input_dim; ++r)
            for (int c = 0; c < input_dim; ++c)
                fd_check(&p.W[s](r, c), analytic.W[s](r, c),
                         "ntn.W[" + std::to_string(s) + "](" + std::to_string(r) + "," +
                             std::to_string(c) + ")");
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < input_dim; ++c)
            fd_check(&p.V(r, c), analytic.V(r, c),
                     "ntn.V(" + std::to_string(r) + "," + std::to_string(c) + ")");
    for (int i = 0; i < k; ++i)
        fd_check(&p.b(i), analytic.b(i), "ntn.b(" + std::to_string(i) + ")");
    for (int i = 0; i < k; ++i)
        fd_check(&p.u(i), analytic.u(i), "ntn.u(" + std::to_string(i) + ")");
    ++report.instances_checked;
}

// Minimum distance to a connective kink over the formula tree, so instances
// whose finite-difference stencil would straddle one can be redrawn.
double min_kink_margin(const Formula& f, const Theta& theta, const Signature& sig,
                       const AtomFeatures& feats, TNormFamily t, double& value) {
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                value = formula_value(f, theta, sig, feats, t);
                return 1.0;
            } else if constexpr (std::is_same_v<T, Not>) {
                double inner = 0.0;
                double m = min_kink_margin(*node.body, theta, sig, feats, t, inner);
                value = 1.0 - inner;
                return m;
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                double a = 0.0, b = 0.0;
                double m = std::min(min_kink_margin(*node.lhs, theta, sig, feats, t, a),
                                    min_kink_margin(*node.rhs, theta, sig, feats, t, b));
                FuzzyOp op = node.op == Connective::And   ? FuzzyOp::And
                             : node.op == Connective::Or  ? FuzzyOp::Or
                                                          : FuzzyOp::Implies;
                value = eval_connective(t, op, a, b);
                double local = 1.0;
                if (t == TNormFamily::Lukasiewicz)
                    local = op == FuzzyOp::Implies ? std::abs(a - b) : std::abs(a + b - 1.0);
                else if (op == FuzzyOp::Implies || t == TNormFamily::Goedel)
                    local = std::abs(a - b);
                return std::min(m, local);
            } else {
                throw std::invalid_argument("quantifier in instantiated body");
            }
        },
        f.node);
}

struct ClauseInstance {
    GroundedTheory theory;
    Theta theta;
    TrainConfig cfg;
};

ClauseInstance make_clause_instance(std::mt19937_64& rng, TNormFamily tnorm, double lambda) {
    const int n_classes = 2;
    const int box_dim = n_classes + 4;
    const int input_dim = 2 * box_dim + 7;
    const int k = 2;

    ClauseInstance inst;
    inst.theory.signature = Signature({"A", "B"}, {"r", "s"},
                                      {"c0", "c1", "c2", "c3"});
    inst.theory.mode = TheoryMode::ExamplesAndConstraints;
    inst.theory.pair_input_dim = input_dim;

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Signature& sig = inst.theory.signature;
    for (const std::string& c : sig.constants()) {
        Eigen::VectorXd bf(box_dim);
        for (int i = 0; i < box_dim; ++i) bf(i) = unit(rng);
        inst.theory.features.boxes.emplace(c, std::move(bf));
    }
    std::vector<std::string> consts(sig.constants().begin(), sig.constants().end());
    for (const std::string& c1 : consts)
        for (const std::string& c2 : consts) {
            if (c1 == c2) continue;
            Eigen::VectorXd pf(input_dim);
            for (int i = 0; i < input_dim; ++i) pf(i) = unit(rng);
            inst.theory.features.pairs.emplace(std::make_pair(c1, c2), std::move(pf));
        }

    auto ratom = [&](const std::string& p, const std::string& a, const std::string& b) {
        return make_atom(p, {Term::constant(a), Term::constant(b)});
    };
    inst.theory.clauses.push_back({{ratom("r", "c0", "c1"), ClauseKind::PositiveExample}, {}});
    inst.theory.clauses.push_back({{ratom("s", "c2", "c3"), ClauseKind::PositiveExample}, {}});
    inst.theory.clauses.push_back(
        {{make_not(ratom("r", "c1", "c2")), ClauseKind::NegativeExample}, {}});
    inst.theory.clauses.push_back(
        {{make_not(ratom("s", "c3", "c0")), ClauseKind::NegativeExample}, {}});

    // A constraint clause with a handful of instantiated bodies mixing
    // learnable and rule-based atoms.
    auto uatom = [&](const std::string& p, const std::string& a) {
        return make_atom(p, {Term::constant(a)});
    };
    TheoryClause constraint;
    constraint.clause = {make_forall({"x", "y"},
                                     make_implies(make_atom("r", {Term::variable("x"),
                                                                  Term::variable("y")}),
                                                  make_not(make_atom("A", {Term::variable("x")})))),
                         ClauseKind::Constraint};
    constraint.instantiations = {
        make_implies(ratom("r", "c0", "c1"), make_not(uatom("A", "c0"))),
        make_implies(ratom("r", "c1", "c2"), make_not(uatom("A", "c1"))),
        make_implies(ratom("r", "c2", "c3"), make_or(uatom("B", "c2"), ratom("s", "c2", "c3"))),
        make_and(ratom("r", "c3", "c2"), ratom("s", "c3", "c2")),
    };
    inst.theory.clauses.push_back(std::move(constraint));

    std::uniform_int_distribution<std::uint64_t> any;
    inst.theta = init_theta(sig, k, input_dim, lambda, any(rng));
    // Widen the initial spread so the fuzzy values cover (0,1) properly.
    for (auto& [name, p] : inst.theta.predicates) {
        p.u *= 6.0;
        p.b *= 6.0;
        p.V *= 6.0;
        for (auto& w : p.W) w *= 6.0;
    }

    inst.cfg.p = -1;
    inst.cfg.tnorm = tnorm;
    inst.cfg.k = k;
    inst.cfg.lambda = lambda;
    inst.cfg.loss_mode = KbAggregation::Kind::PowerMean;
    return inst;
}

double instance_min_margin(const ClauseInstance& inst) {
    double margin = 1.0;
    const AggregationSpec agg = inst.cfg.aggregation();
    // A value of exactly zero sits stably inside the epsilon clamp; only
    // values close to (but distinct from) the clamp floor are fragile.
    auto clamp_margin = [&](double v) { return v == 0.0 ? 1.0 : std::abs(v - agg.epsilon); };
    std::vector<double> clause_vals;
    for (const TheoryClause& tc : inst.theory.clauses) {
        if (tc.clause.kind == ClauseKind::Constraint) {
            std::vector<double> vals;
            for (const FormulaPtr& body : tc.instantiations) {
                double v = 0.0;
                margin = std::min(margin, min_kink_margin(*body, inst.theta,
                                                          inst.theory.signature,
                                                          inst.theory.features, inst.cfg.tnorm,
                                                          v));
                margin = std::min(margin, clamp_margin(v));
                vals.push_back(v);
            }
            clause_vals.push_back(mean_p(vals, agg));
        } else {
            double v = 0.0;
            margin = std::min(margin, min_kink_margin(*tc.clause.formula, inst.theta,
                                                      inst.theory.signature,
                                                      inst.theory.features, inst.cfg.tnorm, v));
            clause_vals.push_back(v);
        }
        margin = std::min(margin, clamp_margin(clause_vals.back()));
    }
    return margin;
}

void check_clause_instance(std::mt19937_64& rng, TNormFamily tnorm, double lambda,
                           const GradCheckOptions& opts, GradCheckReport& report) {
    ClauseInstance inst = make_clause_instance(rng, tnorm, lambda);
    for (int attempt = 0; attempt < 64 && instance_min_margin(inst) < 10.0 * opts.fd_step;
         ++attempt)
        inst = make_clause_instance(rng, tnorm, lambda);

    std::vector<std::size_t> all(inst.theory.clauses.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    GradientBundle grad = GradientBundle::zeros_like(inst.theta);
    loss_and_grad(inst.theory, inst.theta, inst.cfg, all, grad);
    if (opts.flip_b_gradient_sign)
        for (auto& [name, g] : grad.predicates) g.b = -g.b;

    const double h = opts.fd_step;
    std::vector<Coord> coords = parameter_coords(inst.theta);
    GradientBundle scratch = GradientBundle::zeros_like(inst.theta);
    for (const Coord& coord : coords) {
        const double saved = *coord.value;
        scratch.setZero();
        *coord.value = saved + h;
        const double up = loss_and_grad(inst.theory, inst.theta, inst.cfg, all, scratch).objective;
        scratch.setZero();
        *coord.value = saved - h;
        const double dn = loss_and_grad(inst.theory, inst.theta, inst.cfg, all, scratch).objective;
        *coord.value = saved;
        const double fd = (up - dn) / (2.0 * h);
        const double analytic = *grad_coord(grad, inst.theta, coord);
        track(report, relative_error(analytic, fd), "objective/" + coord.name);
    }
    ++report.instances_checked;
}

}  // namespace

GradCheckReport run_gradient_checks(const GradCheckOptions& opts) {
    GradCheckReport report;
    report.tolerance = opts.tolerance;

    auto rng = substream(opts.seed, "gradcheck");
    // Shape sweep for the tensor grounding, starting from the minimal one.
    struct Shape { int k, dim; };
    const Shape shapes[] = {{1, 2}, {1, 4}, {2, 10}, {5, 23}, {3, 7}};
    for (int i = 0; i < opts.ntn_instances; ++i) {
        const Shape& s = shapes[i % (sizeof(shapes) / sizeof(shapes[0]))];
        check_ntn_instance(s.k, s.dim, rng, opts, report);
    }
    for (int i = 0; i < opts.clause_instances; ++i) {
        TNormFamily t = i % 4 == 3   ? TNormFamily::Product
                        : i % 4 == 2 ? TNormFamily::Goedel
                                     : TNormFamily::Lukasiewicz;
        double lambda = i % 2 == 0 ? 0.0 : 1e-3;
        check_clause_instance(rng, t, lambda, opts, report);
    }
    return report;
}

}  // namespace vrel
