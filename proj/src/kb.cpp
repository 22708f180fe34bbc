#include "vrel/kb.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include "vrel/rng.hpp"

namespace vrel {

TheoryMode theory_mode_from_string(const std::string& s) {
    if (s == "expl") return TheoryMode::ExamplesOnly;
    if (s == "prior") return TheoryMode::ExamplesAndConstraints;
    throw std::invalid_argument("unknown theory mode: " + s);
}

std::string to_string(TheoryMode m) {
    return m == TheoryMode::ExamplesOnly ? "expl" : "prior";
}

std::size_t GroundedTheory::example_count() const {
    std::size_t n = 0;
    for (const TheoryClause& c : clauses)
        if (c.clause.kind != ClauseKind::Constraint) ++n;
    return n;
}

std::size_t GroundedTheory::constraint_count() const { return clauses.size() - example_count(); }

std::vector<Clause> build_positive_examples(const AnnotationSet& a, const Signature& sig) {
    std::vector<Clause> out;
    for (const ImageAnnotation& img : a.images) {
        for (const Relationship& r : img.relationships) {
            out.push_back({make_atom(r.predicate, {Term::constant(r.subject_id),
                                                   Term::constant(r.object_id)}),
                           ClauseKind::PositiveExample});
        }
        for (const Detection& d : img.detections)
            for (const std::string& label : d.gold_labels)
                out.push_back(
                    {make_atom(label, {Term::constant(d.id)}), ClauseKind::PositiveExample});
    }
    return out;
}

namespace {

std::set<std::string> completed_labels(const Detection& d, const KbConfig& cfg) {
    std::set<std::string> labels = d.gold_labels;
    if (cfg.isa_closure.empty()) return labels;
    // Transitive closure over the IsA rules.
    std::vector<std::string> frontier(labels.begin(), labels.end());
    while (!frontier.empty()) {
        std::string cur = std::move(frontier.back());
        frontier.pop_back();
        auto it = cfg.isa_closure.find(cur);
        if (it == cfg.isa_closure.end()) continue;
        for (const std::string& implied : it->second)
            if (labels.insert(implied).second) frontier.push_back(implied);
    }
    return labels;
}

/// Ordered same-image pairs (subject, object) that carry no gold relation.
std::vector<std::pair<std::string, std::string>> unrelated_pairs(const ImageAnnotation& img) {
    std::unordered_set<std::string> related;
    for (const Relationship& r : img.relationships) related.insert(r.subject_id + "\x1f" + r.object_id);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const Detection& d1 : img.detections)
        for (const Detection& d2 : img.detections) {
            if (d1.id == d2.id) continue;
            if (!related.count(d1.id + "\x1f" + d2.id)) pairs.emplace_back(d1.id, d2.id);
        }
    return pairs;
}

/// First `take` elements of a seeded uniform shuffle: a uniform sample
/// without replacement that is deterministic under the stream.
template <typename T>
void partial_shuffle_take(std::vector<T>& items, std::size_t take, std::mt19937_64& rng) {
    take = std::min(take, items.size());
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
        std::swap(items[i], items[pick(rng)]);
    }
    items.resize(take);
}

}  // namespace

std::vector<Clause> build_negative_examples(const AnnotationSet& a, const Signature& sig,
                                            std::uint64_t seed, int max_pairs_per_image,
                                            const KbConfig& cfg) {
    std::vector<Clause> out;
    for (const ImageAnnotation& img : a.images) {
        auto pairs = unrelated_pairs(img);
        auto rng = substream(seed, "kb-negatives/" + img.id);
        partial_shuffle_take(pairs, static_cast<std::size_t>(std::max(0, max_pairs_per_image)),
                             rng);
        for (const auto& [sub, obj] : pairs)
            for (const std::string& pred : sig.binary_predicates())
                out.push_back({make_not(make_atom(
                                   pred, {Term::constant(sub), Term::constant(obj)})),
                               ClauseKind::NegativeExample});
        for (const Detection& d : img.detections) {
            std::set<std::string> labels = completed_labels(d, cfg);
            for (const std::string& cls : sig.unary_predicates())
                if (!labels.count(cls))
                    out.push_back({make_not(make_atom(cls, {Term::constant(d.id)})),
                                   ClauseKind::NegativeExample});
        }
    }
    return out;
}

std::vector<std::vector<FormulaPtr>> instantiate_constraints(
    const std::vector<FormulaPtr>& constraints, const AnnotationSet& a, int sample_cap,
    std::uint64_t seed) {
    if (sample_cap < 1) throw std::invalid_argument("constraint sample cap must be >= 1");
    std::vector<std::vector<FormulaPtr>> grouped(constraints.size());
    for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
        const auto* forall = std::get_if<Forall>(&constraints[ci]->node);
        if (!forall || !is_closed(*constraints[ci]))
            throw std::invalid_argument("constraints must be closed universal formulas");
        const std::size_t nvars = forall->variables.size();
        for (const ImageAnnotation& img : a.images) {
            if (img.detections.size() < nvars) continue;
            // All ordered tuples of distinct boxes for this image.
            std::vector<std::vector<std::size_t>> tuples;
            std::vector<std::size_t> pick;
            std::vector<bool> used(img.detections.size(), false);
            std::function<void()> rec = [&]() {
                if (pick.size() == nvars) {
                    tuples.push_back(pick);
                    return;
                }
                for (std::size_t i = 0; i < img.detections.size(); ++i) {
                    if (used[i]) continue;
                    used[i] = true;
                    pick.push_back(i);
                    rec();
                    pick.pop_back();
                    used[i] = false;
                }
            };
            rec();
            auto rng = substream(seed, "kb-constraints/" + img.id + "/" + std::to_string(ci));
            partial_shuffle_take(tuples, static_cast<std::size_t>(sample_cap), rng);
            for (const auto& tuple : tuples) {
                std::unordered_map<std::string, std::string> bind;
                for (std::size_t i = 0; i < nvars; ++i)
                    bind[forall->variables[i]] = img.detections[tuple[i]].id;
                grouped[ci].push_back(instantiate(*constraints[ci], bind));
            }
        }
    }
    return grouped;
}

namespace {

void collect_atom_features(const Formula& f, const AnnotationSet& a,
                           const std::unordered_map<std::string, const ImageAnnotation*>& box_image,
                           const Signature& sig, AtomFeatures& feats) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                if (sig.is_binary(node.predicate)) {
                    const std::string& c1 = node.terms.at(0).name;
                    const std::string& c2 = node.terms.at(1).name;
                    if (feats.has_pair(c1, c2)) return;
                    const ImageAnnotation* img = box_image.at(c1);
                    feats.pairs.emplace(std::make_pair(c1, c2),
                                        pair_features(img->detection(c1), img->detection(c2),
                                                      img->width, img->height));
                }
            } else if constexpr (std::is_same_v<T, Not>) {
                collect_atom_features(*node.body, a, box_image, sig, feats);
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                collect_atom_features(*node.lhs, a, box_image, sig, feats);
                collect_atom_features(*node.rhs, a, box_image, sig, feats);
            } else {
                collect_atom_features(*node.body, a, box_image, sig, feats);
            }
        },
        f.node);
}

}  // namespace

GroundedTheory build_theory(const AnnotationSet& a, const Signature& sig, TheoryMode mode,
                            const std::vector<FormulaPtr>& constraints, const KbConfig& cfg,
                            std::uint64_t seed) {
    GroundedTheory theory;
    theory.mode = mode;
    theory.pair_input_dim = pair_feature_dim(sig);

    std::set<std::string> constants;
    std::unordered_map<std::string, const ImageAnnotation*> box_image;
    for (const ImageAnnotation& img : a.images)
        for (const Detection& d : img.detections) {
            if (!constants.insert(d.id).second)
                throw std::invalid_argument("box id '" + d.id + "' is not globally unique");
            box_image.emplace(d.id, &img);
        }
    theory.signature = Signature(sig.unary_predicates(), sig.binary_predicates(), constants);

    for (Clause& c : build_positive_examples(a, sig))
        theory.clauses.push_back({std::move(c), {}});
    for (Clause& c : build_negative_examples(a, sig, seed, cfg.max_negative_pairs_per_image, cfg))
        theory.clauses.push_back({std::move(c), {}});

    if (mode == TheoryMode::ExamplesAndConstraints) {
        auto grouped = instantiate_constraints(constraints, a, cfg.constraint_sample_cap, seed);
        for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
            if (grouped[ci].empty()) continue;  // nothing to aggregate over
            theory.clauses.push_back(
                {Clause{constraints[ci], ClauseKind::Constraint}, std::move(grouped[ci])});
        }
    }

    // Box features for every detection; pair features for every referenced
    // ordered pair (examples and constraint instantiations alike).
    for (const ImageAnnotation& img : a.images)
        for (const Detection& d : img.detections)
            theory.features.boxes.emplace(d.id, box_feature_vector(d, img.width, img.height));
    for (const TheoryClause& tc : theory.clauses) {
        if (tc.clause.kind == ClauseKind::Constraint) {
            for (const FormulaPtr& body : tc.instantiations)
                collect_atom_features(*body, a, box_image, sig, theory.features);
        } else {
            collect_atom_features(*tc.clause.formula, a, box_image, sig, theory.features);
        }
    }
    return theory;
}

}  // namespace vrel
