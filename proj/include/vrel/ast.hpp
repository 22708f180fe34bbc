#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace vrel {

/// First-order signature: unary predicates (object classes), binary
/// predicates (relations) and the constants naming bounding boxes.
/// The order of `unary_predicates` is load-bearing: index i of the list
/// is index i of the score block in every box feature vector.
class Signature {
public:
    Signature() = default;
    Signature(std::vector<std::string> unary, std::vector<std::string> binary,
              std::set<std::string> constants = {});

    const std::vector<std::string>& unary_predicates() const { return unary_; }
    const std::vector<std::string>& binary_predicates() const { return binary_; }
    const std::set<std::string>& constants() const { return constants_; }

    bool is_unary(const std::string& name) const { return unary_index_.count(name) > 0; }
    bool is_binary(const std::string& name) const { return binary_index_.count(name) > 0; }
    bool is_predicate(const std::string& name) const { return is_unary(name) || is_binary(name); }

    /// 1 for unary predicates, 2 for binary ones. Throws if unknown.
    int arity(const std::string& name) const;
    std::size_t unary_index(const std::string& name) const;
    std::size_t binary_index(const std::string& name) const;

    void add_constant(const std::string& c) { constants_.insert(c); }
    bool has_constant(const std::string& c) const { return constants_.count(c) > 0; }

private:
    std::vector<std::string> unary_;
    std::vector<std::string> binary_;
    std::set<std::string> constants_;
    std::unordered_map<std::string, std::size_t> unary_index_;
    std::unordered_map<std::string, std::size_t> binary_index_;
};

struct Term {
    enum class Kind { Constant, Variable };
    Kind kind;
    std::string name;

    static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }
    static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }
    bool is_variable() const { return kind == Kind::Variable; }
    bool operator==(const Term& other) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Atom {
    std::string predicate;
    std::vector<Term> terms;
};

struct Not {
    FormulaPtr body;
};

enum class Connective { And, Or, Implies };

struct BinaryOp {
    Connective op;
    FormulaPtr lhs;
    FormulaPtr rhs;
};

struct Forall {
    std::vector<std::string> variables;  // at least one
    FormulaPtr body;
};

/// Immutable formula tree. Nodes are shared; treat as value-like.
struct Formula {
    std::variant<Atom, Not, BinaryOp, Forall> node;
};

FormulaPtr make_atom(std::string predicate, std::vector<Term> terms);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr make_or(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr make_implies(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr make_forall(std::vector<std::string> variables, FormulaPtr body);

std::set<std::string> free_variables(const Formula& f);
inline bool is_closed(const Formula& f) { return free_variables(f).empty(); }

/// Replaces every quantified variable of `f` (which must be a Forall) by
/// the constant it is bound to. Bindings must cover exactly the quantified
/// variables; the result is the quantifier-free body, closed if the body
/// had no other free variables.
FormulaPtr instantiate(const Formula& f,
                       const std::unordered_map<std::string, std::string>& bindings);

bool structurally_equal(const Formula& a, const Formula& b);

/// Prints in the constraint-language syntax; parseable back to an
/// identical tree.
std::string to_string(const Formula& f);
std::string to_string(const Term& t);

/// Canonical key for a ground atom, e.g. "ride(b1,b2)".
std::string atom_key(const Atom& a);

enum class ClauseKind { PositiveExample, NegativeExample, Constraint };

/// One knowledge-base formula: a (possibly negated) ground atom when it is
/// an example, a closed universally quantified formula when it is a
/// constraint.
struct Clause {
    FormulaPtr formula;
    ClauseKind kind;
};

}  // namespace vrel
