#include "vrel/ast.hpp"

#include <algorithm>
#include <sstream>

namespace vrel {

Signature::Signature(std::vector<std::string> unary, std::vector<std::string> binary,
                     std::set<std::string> constants)
    : unary_(std::move(unary)), binary_(std::move(binary)), constants_(std::move(constants)) {
    for (std::size_t i = 0; i < unary_.size(); ++i) {
        if (!unary_index_.emplace(unary_[i], i).second)
            throw std::invalid_argument("duplicate unary predicate: " + unary_[i]);
    }
    for (std::size_t i = 0; i < binary_.size(); ++i) {
        if (unary_index_.count(binary_[i]))
            throw std::invalid_argument("predicate is both unary and binary: " + binary_[i]);
        if (!binary_index_.emplace(binary_[i], i).second)
            throw std::invalid_argument("duplicate binary predicate: " + binary_[i]);
    }
}

int Signature::arity(const std::string& name) const {
    if (is_unary(name)) return 1;
    if (is_binary(name)) return 2;
    throw std::out_of_range("unknown predicate: " + name);
}

std::size_t Signature::unary_index(const std::string& name) const {
    auto it = unary_index_.find(name);
    if (it == unary_index_.end()) throw std::out_of_range("unknown unary predicate: " + name);
    return it->second;
}

std::size_t Signature::binary_index(const std::string& name) const {
    auto it = binary_index_.find(name);
    if (it == binary_index_.end()) throw std::out_of_range("unknown binary predicate: " + name);
    return it->second;
}

FormulaPtr make_atom(std::string predicate, std::vector<Term> terms) {
    return std::make_shared<Formula>(Formula{Atom{std::move(predicate), std::move(terms)}});
}

FormulaPtr make_not(FormulaPtr f) {
    return std::make_shared<Formula>(Formula{Not{std::move(f)}});
}

FormulaPtr make_and(FormulaPtr lhs, FormulaPtr rhs) {
    return std::make_shared<Formula>(Formula{BinaryOp{Connective::And, std::move(lhs), std::move(rhs)}});
}

FormulaPtr make_or(FormulaPtr lhs, FormulaPtr rhs) {
    return std::make_shared<Formula>(Formula{BinaryOp{Connective::Or, std::move(lhs), std::move(rhs)}});
}

FormulaPtr make_implies(FormulaPtr lhs, FormulaPtr rhs) {
    return std::make_shared<Formula>(
        Formula{BinaryOp{Connective::Implies, std::move(lhs), std::move(rhs)}});
}

FormulaPtr make_forall(std::vector<std::string> variables, FormulaPtr body) {
    if (variables.empty()) throw std::invalid_argument("forall must bind at least one variable");
    return std::make_shared<Formula>(Formula{Forall{std::move(variables), std::move(body)}});
}

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                for (const Term& t : node.terms)
                    if (t.is_variable() && !bound.count(t.name)) out.insert(t.name);
            } else if constexpr (std::is_same_v<T, Not>) {
                collect_free(*node.body, bound, out);
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                collect_free(*node.lhs, bound, out);
                collect_free(*node.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, Forall>) {
                std::vector<std::string> added;
                for (const std::string& v : node.variables)
                    if (bound.insert(v).second) added.push_back(v);
                collect_free(*node.body, bound, out);
                for (const std::string& v : added) bound.erase(v);
            }
        },
        f.node);
}

FormulaPtr substitute(const Formula& f,
                      const std::unordered_map<std::string, std::string>& bindings) {
    return std::visit(
        [&](const auto& node) -> FormulaPtr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                std::vector<Term> terms;
                terms.reserve(node.terms.size());
                for (const Term& t : node.terms) {
                    if (t.is_variable()) {
                        auto it = bindings.find(t.name);
                        terms.push_back(it != bindings.end() ? Term::constant(it->second) : t);
                    } else {
                        terms.push_back(t);
                    }
                }
                return make_atom(node.predicate, std::move(terms));
            } else if constexpr (std::is_same_v<T, Not>) {
                return make_not(substitute(*node.body, bindings));
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                auto lhs = substitute(*node.lhs, bindings);
                auto rhs = substitute(*node.rhs, bindings);
                return std::make_shared<Formula>(Formula{BinaryOp{node.op, lhs, rhs}});
            } else {  // Forall: inner quantifier shadows outer bindings
                auto inner = bindings;
                for (const std::string& v : node.variables) inner.erase(v);
                return make_forall(node.variables, substitute(*node.body, inner));
            }
        },
        f.node);
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

FormulaPtr instantiate(const Formula& f,
                       const std::unordered_map<std::string, std::string>& bindings) {
    const auto* forall = std::get_if<Forall>(&f.node);
    if (!forall) throw std::invalid_argument("instantiate: formula is not universally quantified");
    for (const std::string& v : forall->variables)
        if (!bindings.count(v)) throw std::invalid_argument("instantiate: missing binding for " + v);
    if (bindings.size() != forall->variables.size())
        throw std::invalid_argument("instantiate: extra bindings supplied");
    return substitute(*forall->body, bindings);
}

bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* x = std::get_if<Atom>(&a.node)) {
        const auto& y = std::get<Atom>(b.node);
        return x->predicate == y.predicate && x->terms == y.terms;
    }
    if (const auto* x = std::get_if<Not>(&a.node)) {
        return structurally_equal(*x->body, *std::get<Not>(b.node).body);
    }
    if (const auto* x = std::get_if<BinaryOp>(&a.node)) {
        const auto& y = std::get<BinaryOp>(b.node);
        return x->op == y.op && structurally_equal(*x->lhs, *y.lhs) &&
               structurally_equal(*x->rhs, *y.rhs);
    }
    const auto& x = std::get<Forall>(a.node);
    const auto& y = std::get<Forall>(b.node);
    return x.variables == y.variables && structurally_equal(*x.body, *y.body);
}

namespace {

// Precedence: not > and > or > implies; forall weakest.
int precedence(const Formula& f) {
    return std::visit(
        [](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) return 5;
            else if constexpr (std::is_same_v<T, Not>) return 4;
            else if constexpr (std::is_same_v<T, BinaryOp>)
                return node.op == Connective::And ? 3 : node.op == Connective::Or ? 2 : 1;
            else return 0;
        },
        f.node);
}

void print(const Formula& f, std::ostringstream& os) {
    auto child = [&os](const Formula& c, int min_prec) {
        if (precedence(c) < min_prec) {
            os << '(';
            print(c, os);
            os << ')';
        } else {
            print(c, os);
        }
    };
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Atom>) {
                os << node.predicate << '(';
                for (std::size_t i = 0; i < node.terms.size(); ++i) {
                    if (i) os << ',';
                    os << node.terms[i].name;
                }
                os << ')';
            } else if constexpr (std::is_same_v<T, Not>) {
                os << "not ";
                child(*node.body, 4);
            } else if constexpr (std::is_same_v<T, BinaryOp>) {
                switch (node.op) {
                    case Connective::And:
                        child(*node.lhs, 3);
                        os << " and ";
                        child(*node.rhs, 4);  // left-assoc: right child binds tighter
                        break;
                    case Connective::Or:
                        child(*node.lhs, 2);
                        os << " or ";
                        child(*node.rhs, 3);
                        break;
                    case Connective::Implies:
                        child(*node.lhs, 2);  // right-assoc
                        os << " -> ";
                        child(*node.rhs, 1);
                        break;
                }
            } else {
                os << "forall ";
                for (std::size_t i = 0; i < node.variables.size(); ++i) {
                    if (i) os << ',';
                    os << node.variables[i];
                }
                os << ": ";
                print(*node.body, os);
            }
        },
        f.node);
}

}  // namespace

std::string to_string(const Formula& f) {
    std::ostringstream os;
    print(f, os);
    return os.str();
}

std::string to_string(const Term& t) { return t.name; }

std::string atom_key(const Atom& a) {
    std::ostringstream os;
    os << a.predicate << '(';
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        if (i) os << ',';
        os << a.terms[i].name;
    }
    os << ')';
    return os.str();
}

}  // namespace vrel
