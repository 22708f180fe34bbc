#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vrel/annotations.hpp"
#include "vrel/ast.hpp"
#include "vrel/formula_grad.hpp"

namespace vrel {

enum class TheoryMode { ExamplesOnly, ExamplesAndConstraints };  // expl / prior

TheoryMode theory_mode_from_string(const std::string& s);
std::string to_string(TheoryMode m);

struct KbConfig {
    int max_negative_pairs_per_image = 32;
    int constraint_sample_cap = 16;
    // Optional IsA closure rules used to complete unary labels before
    // negative examples are drawn, e.g. horse -> {animal}.
    std::map<std::string, std::vector<std::string>> isa_closure;
};

/// One knowledge-base entry. Example clauses carry no instantiations; a
/// constraint clause owns the sampled quantifier-free bodies its universal
/// aggregates over.
struct TheoryClause {
    Clause clause;
    std::vector<FormulaPtr> instantiations;
};

/// The pair <clause set, partial grounding>: clauses plus the fixed feature
/// vectors that ground their atoms. Training completes the grounding by
/// fitting the binary-predicate parameters.
struct GroundedTheory {
    Signature signature;
    TheoryMode mode = TheoryMode::ExamplesOnly;
    std::vector<TheoryClause> clauses;
    AtomFeatures features;
    int pair_input_dim = 0;

    std::size_t example_count() const;
    std::size_t constraint_count() const;
};

/// Positive examples: one clause per gold relationship instance (duplicates
/// preserved) and one per gold unary label.
std::vector<Clause> build_positive_examples(const AnnotationSet& a, const Signature& sig);

/// Relaxed closed-world negatives. Relations: only ordered same-image pairs
/// that carry no gold relationship at all become negative, one clause per
/// binary predicate, with at most `max_pairs_per_image` pairs sampled
/// uniformly per image. Unary: one negated atom per class absent from the
/// (IsA-completed) label set.
std::vector<Clause> build_negative_examples(const AnnotationSet& a, const Signature& sig,
                                            std::uint64_t seed, int max_pairs_per_image,
                                            const KbConfig& cfg = {});

/// For each constraint, samples up to `sample_cap` variable bindings per
/// image (ordered tuples of distinct same-image boxes, uniformly without
/// replacement) and returns the instantiated bodies grouped by constraint.
std::vector<std::vector<FormulaPtr>> instantiate_constraints(
    const std::vector<FormulaPtr>& constraints, const AnnotationSet& a, int sample_cap,
    std::uint64_t seed);

/// Assembles the full grounded theory: examples, sampled constraints (in
/// ExamplesAndConstraints mode) and every feature vector any clause needs.
/// The example clauses depend only on (annotations, seed), never on the
/// mode, so the two modes share them exactly.
GroundedTheory build_theory(const AnnotationSet& a, const Signature& sig, TheoryMode mode,
                            const std::vector<FormulaPtr>& constraints, const KbConfig& cfg,
                            std::uint64_t seed);

}  // namespace vrel
