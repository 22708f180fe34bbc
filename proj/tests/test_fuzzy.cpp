#include <doctest.h>

#include <random>

#include "vrel/fuzzy.hpp"

using namespace vrel;

namespace {
constexpr TNormFamily kFamilies[] = {TNormFamily::Lukasiewicz, TNormFamily::Goedel,
                                     TNormFamily::Product};
}

TEST_CASE("lukasiewicz connective values") {
    const auto t = TNormFamily::Lukasiewicz;
    CHECK(eval_connective(t, FuzzyOp::And, 0.7, 0.5) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(eval_connective(t, FuzzyOp::Not, 0.0) == 1.0);
    CHECK(eval_connective(t, FuzzyOp::Implies, 0.9, 0.3) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(eval_connective(t, FuzzyOp::Or, 0.6, 0.7) == 1.0);
}

TEST_CASE("goedel and product connective values") {
    CHECK(eval_connective(TNormFamily::Goedel, FuzzyOp::And, 0.7, 0.5) == 0.5);
    CHECK(eval_connective(TNormFamily::Goedel, FuzzyOp::Or, 0.7, 0.5) == 0.7);
    CHECK(eval_connective(TNormFamily::Goedel, FuzzyOp::Implies, 0.3, 0.5) == 1.0);
    CHECK(eval_connective(TNormFamily::Goedel, FuzzyOp::Implies, 0.5, 0.3) == 0.3);
    CHECK(eval_connective(TNormFamily::Product, FuzzyOp::And, 0.5, 0.4) == doctest::Approx(0.2));
    CHECK(eval_connective(TNormFamily::Product, FuzzyOp::Or, 0.5, 0.4) == doctest::Approx(0.7));
    CHECK(eval_connective(TNormFamily::Product, FuzzyOp::Implies, 0.8, 0.2) ==
          doctest::Approx(0.25));
    CHECK(eval_connective(TNormFamily::Product, FuzzyOp::Implies, 0.2, 0.8) == 1.0);
}

TEST_CASE("t-norm identities on randomized inputs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (TNormFamily t : kFamilies) {
        for (int i = 0; i < 10000; ++i) {
            const double a = unit(rng), b = unit(rng), c = unit(rng);
            // commutativity
            CHECK(eval_connective(t, FuzzyOp::And, a, b) ==
                  doctest::Approx(eval_connective(t, FuzzyOp::And, b, a)).epsilon(1e-12));
            CHECK(eval_connective(t, FuzzyOp::Or, a, b) ==
                  doctest::Approx(eval_connective(t, FuzzyOp::Or, b, a)).epsilon(1e-12));
            // units
            CHECK(eval_connective(t, FuzzyOp::And, a, 1.0) == doctest::Approx(a).epsilon(1e-12));
            CHECK(eval_connective(t, FuzzyOp::Or, a, 0.0) == doctest::Approx(a).epsilon(1e-12));
            // involution
            CHECK(eval_connective(t, FuzzyOp::Not, eval_connective(t, FuzzyOp::Not, a)) ==
                  doctest::Approx(a).epsilon(1e-12));
            // monotonicity in the first argument (c >= 0 shift)
            const double a2 = std::min(1.0, a + c);
            CHECK(eval_connective(t, FuzzyOp::And, a2, b) >=
                  eval_connective(t, FuzzyOp::And, a, b) - 1e-12);
            CHECK(eval_connective(t, FuzzyOp::Or, a2, b) >=
                  eval_connective(t, FuzzyOp::Or, a, b) - 1e-12);
        }
    }
}

TEST_CASE("lukasiewicz residuation identity holds exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        const double a = unit(rng), b = unit(rng);
        const double lhs = eval_connective(TNormFamily::Lukasiewicz, FuzzyOp::Implies, a, b);
        const double rhs = eval_connective(
            TNormFamily::Lukasiewicz, FuzzyOp::Or,
            eval_connective(TNormFamily::Lukasiewicz, FuzzyOp::Not, a), b);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("mean_p examples") {
    AggregationSpec harmonic{-1, 1e-6};
    CHECK(mean_p({0.5, 1.0}, harmonic) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(mean_p({0.2, 0.4}, {1, 1e-6}) == doctest::Approx(0.3).epsilon(1e-12));
    for (int p : {-3, -1, 1, 2}) {
        CHECK(mean_p({0.7, 0.7, 0.7}, {p, 1e-6}) == doctest::Approx(0.7).epsilon(1e-12));
    }
    CHECK_THROWS_AS(mean_p({}, harmonic), std::invalid_argument);
    CHECK_THROWS_AS(mean_p({0.5}, {0, 1e-6}), std::invalid_argument);
}

TEST_CASE("mean_p bounds and monotonicity on randomized inputs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(1e-6, 1.0);
    std::uniform_int_distribution<int> size(1, 8);
    const int ps[] = {-2, -1, 1, 2};
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> xs(size(rng));
        for (double& x : xs) x = unit(rng);
        for (int p : ps) {
            AggregationSpec spec{p, 1e-6};
            const double m = mean_p(xs, spec);
            const double lo = *std::min_element(xs.begin(), xs.end());
            const double hi = *std::max_element(xs.begin(), xs.end());
            CHECK(m >= lo - 1e-12);
            CHECK(m <= hi + 1e-12);
            // monotone nondecreasing in each argument
            std::vector<double> bumped = xs;
            std::uniform_int_distribution<std::size_t> at(0, xs.size() - 1);
            std::size_t j = at(rng);
            bumped[j] = std::min(1.0, bumped[j] + 0.05);
            CHECK(mean_p(bumped, spec) >= m - 1e-12);
        }
        // harmonic mean strictly below arithmetic when values differ
        if (xs.size() >= 2) {
            const double lo = *std::min_element(xs.begin(), xs.end());
            const double hi = *std::max_element(xs.begin(), xs.end());
            if (hi - lo > 1e-9) {
                CHECK(mean_p(xs, {-1, 1e-6}) < mean_p(xs, {1, 1e-6}));
            }
        }
    }
}

TEST_CASE("formula evaluation composes connectives over atom values") {
    Signature sig({"Dog"}, {"ride"}, {"b1", "b2"});
    auto ride = make_atom("ride", {Term::constant("b1"), Term::constant("b2")});
    auto dog = make_atom("Dog", {Term::constant("b1")});
    TruthAssignment atoms{{"ride(b1,b2)", 0.9}, {"Dog(b1)", 0.1}};
    AggregationSpec agg{-1, 1e-6};

    auto f = make_implies(ride, make_not(dog));
    CHECK(eval_formula(*f, atoms, TNormFamily::Lukasiewicz, agg) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // t-norm unit element
    TruthAssignment units{{"ride(b1,b2)", 1.0}, {"Dog(b1)", 0.37}};
    auto conj = make_and(make_atom("ride", {Term::constant("b1"), Term::constant("b2")}),
                         make_atom("Dog", {Term::constant("b1")}));
    CHECK(eval_formula(*conj, units, TNormFamily::Lukasiewicz, agg) ==
          doctest::Approx(0.37).epsilon(1e-12));

    CHECK_THROWS_AS(eval_formula(*make_atom("ride", {Term::constant("b2"), Term::constant("b1")}),
                                 atoms, TNormFamily::Lukasiewicz, agg),
                    std::out_of_range);
}

TEST_CASE("universals aggregate with mean_p over the instantiation set") {
    Signature sig({"Dog"}, {"ride"}, {"b1", "b2", "b3"});
    auto f = make_forall({"x"}, make_atom("Dog", {Term::variable("x")}));
    AggregationSpec agg{-1, 1e-6};

    TruthAssignment constant{{"Dog(b1)", 0.6}, {"Dog(b2)", 0.6}, {"Dog(b3)", 0.6}};
    auto inst = domain_instantiator({"b1", "b2", "b3"});
    CHECK(eval_formula(*f, constant, TNormFamily::Lukasiewicz, agg, inst) ==
          doctest::Approx(0.6).epsilon(1e-12));

    TruthAssignment mixed{{"Dog(b1)", 0.5}, {"Dog(b2)", 1.0}};
    auto inst2 = domain_instantiator({"b1", "b2"});
    CHECK(eval_formula(*f, mixed, TNormFamily::Lukasiewicz, agg, inst2) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // two-variable universals range over ordered pairs of distinct constants
    auto g = make_forall({"x", "y"},
                         make_atom("ride", {Term::variable("x"), Term::variable("y")}));
    TruthAssignment pair_vals{{"ride(b1,b2)", 0.5}, {"ride(b2,b1)", 1.0}};
    CHECK(eval_formula(*g, pair_vals, TNormFamily::Lukasiewicz, agg, inst2) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(eval_formula(*f, constant, TNormFamily::Lukasiewicz, agg,
                                 domain_instantiator({})),
                    std::invalid_argument);
    CHECK_THROWS_AS(eval_formula(*f, constant, TNormFamily::Lukasiewicz, agg),
                    std::invalid_argument);
}

TEST_CASE("formula values stay in [0,1] on random formulas and assignments") {
    Signature sig({"A", "B"}, {"r"}, {"c1", "c2"});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    AggregationSpec agg{-1, 1e-6};
    for (int i = 0; i < 2000; ++i) {
        TruthAssignment atoms{{"A(c1)", unit(rng)},    {"A(c2)", unit(rng)},
                              {"B(c1)", unit(rng)},    {"B(c2)", unit(rng)},
                              {"r(c1,c2)", unit(rng)}, {"r(c2,c1)", unit(rng)}};
        // a fixed shape with randomized leaves exercises every connective
        auto f = make_implies(
            make_and(make_atom("A", {Term::constant("c1")}),
                     make_or(make_atom("B", {Term::constant("c2")}),
                             make_not(make_atom("r", {Term::constant("c1"),
                                                      Term::constant("c2")})))),
            make_not(make_atom("r", {Term::constant("c2"), Term::constant("c1")})));
        for (TNormFamily t : kFamilies) {
            const double v = eval_formula(*f, atoms, t, agg);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("kb satisfiability modes") {
    const std::vector<double> twenty(20, 0.9);
    CHECK(kb_satisfiability(twenty, KbAggregation::tnorm_conjunction(TNormFamily::Lukasiewicz)) ==
          0.0);
    CHECK(kb_satisfiability(twenty, KbAggregation::power_mean({-1, 1e-6})) ==
          doctest::Approx(0.9).epsilon(1e-12));
    CHECK(kb_satisfiability({0.42}, KbAggregation::tnorm_conjunction(TNormFamily::Lukasiewicz)) ==
          doctest::Approx(0.42));
    CHECK(kb_satisfiability({0.42}, KbAggregation::power_mean({-1, 1e-6})) ==
          doctest::Approx(0.42));
    CHECK_THROWS_AS(kb_satisfiability({}, KbAggregation::power_mean({-1, 1e-6})),
                    std::invalid_argument);
}

TEST_CASE("lukasiewicz conjunction never exceeds the harmonic mean") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 30);
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> xs(size(rng));
        for (double& x : xs) x = unit(rng);
        const double conj =
            kb_satisfiability(xs, KbAggregation::tnorm_conjunction(TNormFamily::Lukasiewicz));
        const double hmean = kb_satisfiability(xs, KbAggregation::power_mean({-1, 1e-6}));
        CHECK(conj <= hmean + 1e-12);
    }
}
