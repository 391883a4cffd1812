#include "oracles.hpp"
#include "rsineq/error.hpp"
#include "rsineq/lhv.hpp"
#include "rsineq/polynomial.hpp"
#include "rsineq/report.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace rsineq;

namespace {

VariableId v(const char* s) { return VariableId::parse(s); }

std::vector<CorrelationTerm> expected_terms(std::initializer_list<std::tuple<const char*, const char*, int>> list) {
    std::vector<CorrelationTerm> out;
    for (const auto& [a, b, c] : list) {
        CorrelationTerm t;
        t.first = v(a);
        t.second = v(b);
        t.coefficient = c;
        t.kind = t.first.party == t.second.party ? TermKind::SameParty : TermKind::CrossParty;
        out.push_back(t);
    }
    return out;
}

void check_expansion_matches_squares(const RsExpression& e) {
    const auto poly = expand(e);
    oracle::for_each_assignment(e.variables(), [&](const auto& a) {
        REQUIRE(poly.evaluate(a) == oracle::evaluate_squares(e, a));
    });
}

RsExpression random_odd_expression(std::mt19937_64& rng, std::size_t max_vars) {
    std::uniform_int_distribution<int> groups(1, 5), coeff(-2, 2), offset(-4, 4);
    std::vector<VariableId> pool;
    for (std::uint32_t i = 1; i <= max_vars / 2; ++i) pool.emplace_back('X', i);
    for (std::uint32_t i = 1; pool.size() < max_vars; ++i) pool.emplace_back('Y', i);
    RsExpression e;
    const int g = groups(rng);
    for (int i = 0; i < g; ++i) {
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::size_t k = 1 + 2 * (rng() % std::min<std::size_t>(3, (pool.size() + 1) / 2));
        std::vector<LinearTerm> terms;
        for (std::size_t t = 0; t < k; ++t) {
            int c = 0;
            while (c == 0 || c % 2 == 0) c = coeff(rng);
            terms.push_back({c, pool[t]});
        }
        e.groups.emplace_back(std::move(terms));
    }
    e.constant_offset = offset(rng);
    e.bound = implied_lhs_bound(e);
    return e;
}

}  // namespace

TEST_CASE("multilinear arithmetic applies v^2 = 1") {
    const auto x = MultilinearPoly::variable(v("X1"));
    const auto y = MultilinearPoly::variable(v("Y1"));
    const auto sq = (x + y) * (x + y);
    CHECK(sq.constant_term() == 2);
    CHECK(sq.coefficient({v("X1"), v("Y1")}) == 2);
    CHECK(sq.degree() == 2);
    CHECK(sq.str() == "2 + 2*X1Y1");
    CHECK((x - x).is_zero());
    CHECK((x * x) == MultilinearPoly::constant(1));

    MultilinearPoly p;
    p.add_term({v("Y1"), v("X1"), v("Y1")}, 3);
    CHECK(p.coefficient({v("X1")}) == 3);
    CHECK(p.degree() == 1);
    CHECK_THROWS_AS((void)p.evaluate({}), Error);
}

TEST_CASE("expand examples agree with direct evaluation") {
    const auto chsh = parse_rs(fixtures::chsh_rsx);
    check_expansion_matches_squares(chsh);
    const auto chsh_poly = expand(chsh);
    CHECK(chsh_poly.constant_term() == 6);
    CHECK(oracle::brute_extrema(chsh.variables(), [&](const auto& a) { return chsh_poly.evaluate(a); }).min == 2);

    const auto pair = expand(parse_rs("(X1 + Y1)^2 >= 0"));
    MultilinearPoly expected = MultilinearPoly::constant(2);
    expected.add_term({v("X1"), v("Y1")}, 2);
    CHECK(pair == expected);

    const auto hybrid = parse_rs(fixtures::hybrid_rsx);
    check_expansion_matches_squares(hybrid);
    MultilinearPoly hand = MultilinearPoly::constant(6);
    hand.add_term({v("X1"), v("X2")}, -2);
    hand.add_term({v("X2"), v("Y1")}, 2);
    hand.add_term({v("X1"), v("Y2")}, -2);
    hand.add_term({v("Y1"), v("Y2")}, -2);
    CHECK(expand(hybrid) == hand);

    for (auto src : {fixtures::kcbs_rsx, fixtures::cycle7_rsx, fixtures::lg_rsx, fixtures::monogamy_rsx,
                     fixtures::chained_alternating5_rsx}) {
        check_expansion_matches_squares(parse_rs(src));
    }
}

TEST_CASE("derive: CHSH") {
    const auto ineq = derive_inequality(parse_rs(fixtures::chsh_rsx));
    CHECK(ineq.terms == expected_terms({{"X1", "Y1", 1}, {"X1", "Y2", 1}, {"X2", "Y1", 1}, {"X2", "Y2", -1}}));
    CHECK(ineq.direction == Comparator::LessEq);
    CHECK(ineq.bound == Rational(2));
    CHECK(ineq.str() == "<X1Y1> + <X1Y2> + <X2Y1> - <X2Y2> <= 2");
    CHECK(ineq.warnings.empty());
    const auto ex = classical_extrema(ineq);
    CHECK(ex.max == 2);
    CHECK(ex.min == -2);
}

TEST_CASE("derive: KCBS five-cycle") {
    const auto ineq = derive_inequality(parse_rs(fixtures::kcbs_rsx));
    CHECK(ineq.terms ==
          expected_terms({{"X1", "X2", 1}, {"X1", "X5", 1}, {"X2", "X3", 1}, {"X3", "X4", 1}, {"X4", "X5", 1}}));
    CHECK(ineq.direction == Comparator::GreaterEq);
    CHECK(ineq.bound == Rational(-3));
    CHECK(classical_extrema(ineq).min == -3);
}

TEST_CASE("derive: seven-cycle with offset uses the odd-square bound") {
    const auto src = parse_rs(fixtures::cycle7_rsx);
    const auto verdicts = validate_odd_groups(src);
    CHECK(verdicts.size() == 5);
    for (const auto& g : verdicts) {
        CHECK(g.term_count == 3);
        CHECK(g.odd);
        CHECK(g.implied_lower_bound == 1);
    }
    CHECK(implied_lhs_bound(src) == 10);
    const auto poly = expand(src);
    CHECK(oracle::brute_extrema(src.variables(), [&](const auto& a) { return poly.evaluate(a); }).min >= 10);

    const auto ineq = derive_inequality(src);
    CHECK(ineq.bound == Rational(-5));
    CHECK(ineq.direction == Comparator::GreaterEq);
    CHECK(ineq.bound_source == BoundSource::Implied);
    CHECK(ineq.terms.size() == 7);
    for (const auto& t : ineq.terms) CHECK(t.coefficient == 1);
    CHECK(classical_extrema(ineq).min == -5);
}

TEST_CASE("derive: LG on one system") {
    const auto ineq = derive_inequality(parse_rs(fixtures::lg_rsx));
    CHECK(ineq.terms == expected_terms({{"J", "K", 1}, {"J", "M", -1}, {"K", "L", 1}, {"L", "M", 1}}));
    CHECK(ineq.direction == Comparator::LessEq);
    CHECK(ineq.bound == Rational(2));
    CHECK(classical_extrema(ineq).max == 2);
    CHECK(classify(ineq, parse_scenario(fixtures::lg_scn)).kind == InequalityKind::Temporal);
}

TEST_CASE("derive: hybrid") {
    const auto ineq = derive_inequality(parse_rs(fixtures::hybrid_rsx));
    CHECK(ineq.terms == expected_terms({{"X1", "X2", 1}, {"X1", "Y2", 1}, {"X2", "Y1", -1}, {"Y1", "Y2", 1}}));
    CHECK(ineq.terms[0].kind == TermKind::SameParty);
    CHECK(ineq.terms[1].kind == TermKind::CrossParty);
    CHECK(ineq.terms[2].kind == TermKind::CrossParty);
    CHECK(ineq.terms[3].kind == TermKind::SameParty);
    CHECK(ineq.bound == Rational(2));
    CHECK(ineq.direction == Comparator::LessEq);
    CHECK(classical_extrema(ineq).max == 2);
    const auto cls = classify(ineq, parse_scenario(fixtures::hybrid_scn));
    CHECK(cls.kind == InequalityKind::Hybrid);
    CHECK(cls.per_term == std::vector<TermRealization>{TermRealization::Temporal, TermRealization::Spatial,
                                                       TermRealization::Spatial, TermRealization::Temporal});
}

TEST_CASE("classify spatial and contextual cases") {
    const auto chsh = derive_inequality(parse_rs(fixtures::chsh_rsx));
    CHECK(classify(chsh, parse_scenario(fixtures::chsh_scn)).kind == InequalityKind::Spatial);
    const auto kcbs = derive_inequality(parse_rs(fixtures::kcbs_rsx));
    CHECK(classify(kcbs, parse_scenario(fixtures::kcbs_scn)).kind == InequalityKind::Contextual);
    CHECK_THROWS_AS(classify(kcbs, parse_scenario("variables: X1, X2\n")), Error);
}

TEST_CASE("even groups warn, strict mode rejects") {
    const auto src = parse_rs("(X1 + Y1)^2 >= 0");
    const auto verdicts = validate_odd_groups(src);
    REQUIRE(verdicts.size() == 1);
    CHECK_FALSE(verdicts[0].odd);
    CHECK(verdicts[0].implied_lower_bound == 0);

    const auto ineq = derive_inequality(src);
    CHECK(ineq.has_warning(DerivationWarning::EvenGroup));
    CHECK(ineq.bound == Rational(-1));
    CHECK(ineq.direction == Comparator::GreaterEq);

    DeriveOptions strict;
    strict.strict_odd = true;
    try {
        derive_inequality(src, strict);
        FAIL("expected EvenGroup");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EvenGroup);
    }
    CHECK(derive_inequality(parse_rs(fixtures::chsh_rsx), strict).bound == Rational(2));
}

TEST_CASE("stated bound above the implied one is flagged") {
    const auto ineq = derive_inequality(parse_rs("(X1 + Y1 + Y2)^2 >= 4"));
    CHECK(ineq.has_warning(DerivationWarning::StatedBoundExceedsImplied));
    CHECK(ineq.bound_source == BoundSource::Stated);
}

TEST_CASE("residual degree through the low-level overload") {
    MultilinearPoly p = MultilinearPoly::constant(3);
    p.add_term({v("X1")}, 2);
    p.add_term({v("X1"), v("Y1")}, 2);
    try {
        derive_inequality(p, Comparator::GreaterEq, Rational(1));
        FAIL("expected ResidualDegree");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ResidualDegree);
    }
    MultilinearPoly cubic;
    cubic.add_term({v("X1"), v("X2"), v("Y1")}, 2);
    CHECK_THROWS_AS(derive_inequality(cubic, Comparator::LessEq, Rational(0)), Error);

    MultilinearPoly fine = MultilinearPoly::constant(1);
    fine.add_term({v("X1"), v("Y1")}, -2);
    const auto ineq = derive_inequality(fine, Comparator::LessEq, Rational(4));
    CHECK(ineq.direction == Comparator::GreaterEq);
    CHECK(ineq.bound == Rational(-3, 2));
    CHECK(ineq.terms[0].coefficient == 1);
}

TEST_CASE("odd-group bound holds for random expressions (property)") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 300; ++trial) {
        const auto e = random_odd_expression(rng, 2 + rng() % 11);
        const auto poly = expand(e);
        const auto vars = e.variables();
        const auto brute = oracle::brute_extrema(vars, [&](const auto& a) { return oracle::evaluate_squares(e, a); });
        CHECK(brute.min >= static_cast<std::int64_t>(e.groups.size()) + e.constant_offset);
        oracle::for_each_assignment(vars, [&](const auto& a) { REQUIRE(poly.evaluate(a) == oracle::evaluate_squares(e, a)); });

        const auto ineq = derive_inequality(e);
        CHECK(reconstruct_expansion(ineq) == poly);
        if (!ineq.terms.empty()) {
            const auto ex = classical_extrema(ineq);
            const Rational lo = ineq.direction == Comparator::GreaterEq ? Rational(ex.min) : Rational(ex.max);
            if (ineq.direction == Comparator::GreaterEq) CHECK(lo >= ineq.bound);
            else CHECK(lo <= ineq.bound);
        }
    }
}

TEST_CASE("a 20-variable odd expression meets its bound exhaustively") {
    RsExpression e;
    for (std::uint32_t i = 1; i <= 18; i += 3) {
        e.groups.emplace_back(std::vector<LinearTerm>{
            {1, VariableId('X', i)}, {-1, VariableId('X', i + 1)}, {1, VariableId('Y', i + 2)}});
    }
    e.groups.emplace_back(std::vector<LinearTerm>{{1, VariableId('X', 1)}, {1, VariableId('Y', 19)}, {1, VariableId('Y', 20)}});
    e.bound = implied_lhs_bound(e);
    REQUIRE(e.variables().size() == 20);
    const auto ex = classical_extrema(expand(e));
    CHECK(ex.min >= static_cast<std::int64_t>(e.groups.size()));
}

TEST_CASE("chained cycles have bound n-2 in both forms") {
    for (int n : {5, 7, 9, 11}) {
        CAPTURE(n);
        const auto plain_src = chained_cycle_source(n, false);
        CHECK(plain_src.groups.size() == static_cast<std::size_t>(n - 2));
        const auto plain = derive_inequality(plain_src);
        CHECK(plain.terms.size() == static_cast<std::size_t>(n));
        for (const auto& t : plain.terms) CHECK(t.coefficient == 1);
        CHECK(plain.direction == Comparator::GreaterEq);
        CHECK(plain.bound == Rational(-(n - 2)));
        const auto poly = plain.lhs();
        CHECK(oracle::brute_extrema(poly.variables(), [&](const auto& a) { return poly.evaluate(a); }).min == -(n - 2));

        const auto alt = derive_inequality(chained_cycle_source(n, true));
        CHECK(alt.terms.size() == static_cast<std::size_t>(n));
        CHECK(alt.direction == Comparator::LessEq);
        CHECK(alt.bound == Rational(n - 2));
        int negatives = 0;
        for (const auto& t : alt.terms) negatives += t.coefficient < 0;
        CHECK(negatives == 1);
        const auto alt_poly = alt.lhs();
        CHECK(oracle::brute_extrema(alt_poly.variables(), [&](const auto& a) { return alt_poly.evaluate(a); }).max ==
              n - 2);
    }
    CHECK_THROWS_AS(chained_cycle_source(6, false), Error);
    CHECK_THROWS_AS(chained_cycle_source(3, false), Error);
}

TEST_CASE("rational arithmetic is exact") {
    CHECK(Rational(4, -6) == Rational(-2, 3));
    CHECK(Rational(4, -6).str() == "-2/3");
    CHECK(Rational(6, 3).is_integer());
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(1, 3) - Rational(1, 2) == Rational(-1, 6));
    CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
    CHECK(Rational(2, 3) / Rational(4, 3) == Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(1, 3));
    CHECK(Rational(7, 2).to_double() == doctest::Approx(3.5));
    CHECK_THROWS_AS(Rational(1, 0), Error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
}
