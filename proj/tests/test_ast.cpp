#include <doctest.h>

#include <random>

#include "vrel/ast.hpp"
#include "vrel/parser.hpp"

using namespace vrel;

namespace {

Signature demo_signature() {
    return Signature({"Dog", "Dress", "Person", "Horse"},
                     {"drive", "ride", "on", "sleep_on"},
                     {"b1", "b2", "b3"});
}

const BinaryOp& body_op(const FormulaPtr& f) {
    return std::get<BinaryOp>(std::get<Forall>(f->node).body->node);
}

}  // namespace

TEST_CASE("parses the negative domain constraint") {
    Signature sig = demo_signature();
    auto fs = parse_constraints("forall x,y: drive(x,y) -> not Dress(x)\n", sig);
    REQUIRE(fs.size() == 1);
    FormulaPtr expected = make_forall(
        {"x", "y"},
        make_implies(make_atom("drive", {Term::variable("x"), Term::variable("y")}),
                     make_not(make_atom("Dress", {Term::variable("x")}))));
    CHECK(structurally_equal(*fs[0], *expected));
    CHECK(is_closed(*fs[0]));
}

TEST_CASE("empty and comment-only files parse to nothing") {
    Signature sig = demo_signature();
    CHECK(parse_constraints("", sig).empty());
    CHECK(parse_constraints("# only a comment\n\n   \n# another\n", sig).empty());
}

TEST_CASE("arity mismatch is rejected") {
    Signature sig = demo_signature();
    CHECK_THROWS_AS(parse_constraints("forall x: ride(x) -> Dog(x)\n", sig), ParseError);
    CHECK_THROWS_AS(parse_constraints("forall x,y: Dog(x,y) -> Dog(x)\n", sig), ParseError);
}

TEST_CASE("unknown predicates and unbound variables are rejected with locations") {
    Signature sig = demo_signature();
    try {
        parse_constraints("forall x: Cat(x) -> Dog(x)\n", sig);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 11);
    }
    CHECK_THROWS_WITH_AS(parse_constraints("forall x: Dog(x) -> Dog(z)\n", sig),
                         doctest::Contains("unbound variable"), ParseError);
    // Names in the signature's constant set are constants, not variables.
    auto fs = parse_constraints("forall x: ride(x, b1) -> Dog(x)\n", sig);
    CHECK(is_closed(*fs[0]));
}

TEST_CASE("precedence, comments and parentheses") {
    Signature sig = demo_signature();
    auto fs = parse_constraints(
        "forall x,y: ride(x,y) and on(x,y) -> Dog(x) or not Dress(y)  # trailer\n"
        "forall x,y: (ride(x,y) -> Dog(x)) -> Dress(y)\n"
        "forall x,y: ride(x,y) -> on(x,y) -> Dog(x)\n",
        sig);
    REQUIRE(fs.size() == 3);
    // not > and > or > ->
    const BinaryOp& f0 = body_op(fs[0]);
    CHECK(f0.op == Connective::Implies);
    CHECK(std::get<BinaryOp>(f0.lhs->node).op == Connective::And);
    CHECK(std::get<BinaryOp>(f0.rhs->node).op == Connective::Or);
    // parenthesized implication on the left
    const BinaryOp& f1 = body_op(fs[1]);
    CHECK(std::get<BinaryOp>(f1.lhs->node).op == Connective::Implies);
    // right-associative chain
    const BinaryOp& f2 = body_op(fs[2]);
    CHECK(std::get<Atom>(f2.lhs->node).predicate == "ride");
    CHECK(std::get<BinaryOp>(f2.rhs->node).op == Connective::Implies);
}

TEST_CASE("instantiate substitutes all bound variables") {
    Signature sig = demo_signature();
    auto f = parse_constraints("forall x,y: ride(x,y) -> not Dog(x)\n", sig)[0];
    auto inst = instantiate(*f, {{"x", "b1"}, {"y", "b2"}});
    auto expected = make_implies(
        make_atom("ride", {Term::constant("b1"), Term::constant("b2")}),
        make_not(make_atom("Dog", {Term::constant("b1")})));
    CHECK(structurally_equal(*inst, *expected));
    CHECK(free_variables(*inst).empty());

    auto g = make_forall({"x"}, make_atom("Dog", {Term::variable("x")}));
    CHECK(structurally_equal(*instantiate(*g, {{"x", "b1"}}),
                             *make_atom("Dog", {Term::constant("b1")})));

    CHECK_THROWS_WITH_AS(instantiate(*f, {{"x", "b1"}}), doctest::Contains("missing binding"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(instantiate(*f, {{"x", "b1"}, {"y", "b2"}, {"z", "b3"}}),
                         doctest::Contains("extra"), std::invalid_argument);
}

TEST_CASE("free variables") {
    auto a = make_atom("ride", {Term::variable("x"), Term::constant("b1")});
    CHECK(free_variables(*a) == std::set<std::string>{"x"});
    auto closed = make_forall({"x", "y"},
                              make_atom("ride", {Term::variable("x"), Term::variable("y")}));
    CHECK(free_variables(*closed).empty());
    auto mixed = make_implies(
        make_atom("Dog", {Term::variable("x")}),
        make_forall({"y"}, make_atom("ride", {Term::variable("x"), Term::variable("y")})));
    CHECK(free_variables(*mixed) == std::set<std::string>{"x"});
}

namespace {

FormulaPtr random_formula(std::mt19937_64& rng, const Signature& sig,
                          const std::vector<std::string>& vars, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 4);
    std::uniform_int_distribution<std::size_t> var(0, vars.size() - 1);
    switch (pick(rng)) {
        case 1:
            return make_not(random_formula(rng, sig, vars, depth - 1));
        case 2:
            return make_and(random_formula(rng, sig, vars, depth - 1),
                            random_formula(rng, sig, vars, depth - 1));
        case 3:
            return make_or(random_formula(rng, sig, vars, depth - 1),
                           random_formula(rng, sig, vars, depth - 1));
        case 4:
            return make_implies(random_formula(rng, sig, vars, depth - 1),
                                random_formula(rng, sig, vars, depth - 1));
        default: {
            std::uniform_int_distribution<int> unary(0, 1);
            if (unary(rng)) {
                std::uniform_int_distribution<std::size_t> p(0, sig.unary_predicates().size() - 1);
                return make_atom(sig.unary_predicates()[p(rng)], {Term::variable(vars[var(rng)])});
            }
            std::uniform_int_distribution<std::size_t> p(0, sig.binary_predicates().size() - 1);
            return make_atom(sig.binary_predicates()[p(rng)],
                             {Term::variable(vars[var(rng)]), Term::variable(vars[var(rng)])});
        }
    }
}

}  // namespace

TEST_CASE("print/parse round-trip over a generated corpus") {
    Signature sig = demo_signature();
    std::mt19937_64 rng(20240811);
    const std::vector<std::string> vars = {"x", "y"};
    for (int i = 0; i < 500; ++i) {
        FormulaPtr f = make_forall(vars, random_formula(rng, sig, vars, 4));
        std::string printed = to_string(*f);
        FormulaPtr reparsed = parse_formula(printed, sig);
        CAPTURE(printed);
        CHECK(structurally_equal(*f, *reparsed));
    }
}

TEST_CASE("instantiate leaves no free variables over a generated corpus") {
    Signature sig = demo_signature();
    std::mt19937_64 rng(42);
    const std::vector<std::string> vars = {"x", "y"};
    for (int i = 0; i < 200; ++i) {
        FormulaPtr f = make_forall(vars, random_formula(rng, sig, vars, 3));
        auto inst = instantiate(*f, {{"x", "b1"}, {"y", "b3"}});
        CHECK(free_variables(*inst).empty());
    }
}

TEST_CASE("random arity corruption always fails to parse") {
    Signature sig = demo_signature();
    std::mt19937_64 rng(7);
    const std::vector<std::string> vars = {"x", "y"};
    int corrupted = 0;
    for (int i = 0; i < 200; ++i) {
        FormulaPtr f = make_forall(vars, random_formula(rng, sig, vars, 3));
        std::string bad = to_string(*f);
        // Swap a unary predicate for a binary one (or vice versa) in place.
        auto pos = bad.find("Dog(");
        if (pos != std::string::npos) {
            bad.replace(pos, 3, "ride");
        } else if ((pos = bad.find("ride(")) != std::string::npos) {
            bad.replace(pos, 4, "Dog");
        } else {
            continue;
        }
        ++corrupted;
        CHECK_THROWS_AS(parse_formula(bad, sig), ParseError);
    }
    CHECK(corrupted > 50);
}

TEST_CASE("signature rejects duplicate or overlapping predicate names") {
    CHECK_THROWS_AS(Signature({"A", "A"}, {"r"}), std::invalid_argument);
    CHECK_THROWS_AS(Signature({"A"}, {"A"}), std::invalid_argument);
    CHECK_THROWS_AS(Signature({"A"}, {"r", "r"}), std::invalid_argument);
}
