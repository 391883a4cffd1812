#include "rsineq/protocol.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <set>

using namespace rsineq;

namespace {

using A = LocalAction;
using L = CorrelatorLabel;

constexpr double kSqrt2 = std::numbers::sqrt2;

double analytic(L label, const DensityMatrix& rho, const HybridSettings& s) {
    switch (label) {
        case L::X1X2: return dot(s.x1, s.x2);
        case L::X1Y1: return spatial_correlator(rho, s.x1, s.y1);
        case L::X1Y2: return spatial_correlator(rho, s.x1, s.y2);
        case L::X2Y1: return spatial_correlator(rho, s.x2, s.y1);
        case L::Y1Y2: return dot(s.y1, s.y2);
    }
    return 0.0;
}

double analytic_f(const DensityMatrix& rho, const HybridSettings& s) {
    return analytic(L::X1X2, rho, s) + analytic(L::X1Y2, rho, s) - analytic(L::X2Y1, rho, s) + analytic(L::Y1Y2, rho, s);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("admissible data follows the enumerated mapping") {
    const std::map<std::pair<A, A>, std::vector<L>> expected{
        {{A::None, A::Both}, {L::Y1Y2}},
        {{A::Both, A::None}, {L::X1X2}},
        {{A::First, A::Second}, {L::X1Y2}},
        {{A::Second, A::First}, {L::X2Y1}},
        {{A::First, A::Both}, {L::X1Y1, L::Y1Y2}},
        {{A::Both, A::First}, {L::X1X2}},
        {{A::Second, A::Both}, {L::X2Y1, L::Y1Y2}},
        {{A::Both, A::Second}, {L::X1X2, L::X1Y2}},
        {{A::Both, A::Both}, {L::X1X2, L::Y1Y2}},
    };
    const auto choices = all_choices();
    REQUIRE(choices.size() == 16);
    std::set<L> gathered;
    for (const auto& c : choices) {
        const auto it = expected.find({c.alice, c.bob});
        const auto got = admissible_data(c);
        if (it == expected.end()) {
            CHECK(got.empty());
        } else {
            CHECK(got == it->second);
        }
        gathered.insert(got.begin(), got.end());
    }
    const auto first_both = admissible_data({A::First, A::Both});
    CHECK(std::find(first_both.begin(), first_both.end(), L::X1Y2) == first_both.end());
    for (auto l : {L::X1X2, L::X1Y2, L::X2Y1, L::Y1Y2}) CHECK(gathered.count(l) == 1);
    CHECK(data_yielding_choices().size() == 9);
    CHECK(admissible_data({A::None, A::None}).empty());
    CHECK(choice_label({A::Both, A::None}) == "X1X2,-");
    CHECK(correlator_label_name(L::Y1Y2) == "Y1Y2");
}

TEST_CASE("simulate_shot examples") {
    const HybridSettings flat{};
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto shot = simulate_shot(DensityMatrix::singlet(), {A::First, A::First}, flat, 1, s);
        REQUIRE(shot.outcomes.size() == 2);
        CHECK(*shot.outcome(VariableId('X', 1)) == -*shot.outcome(VariableId('Y', 1)));

        const auto n = BlochVector::coplanar(0.7);
        const auto rep = simulate_shot(DensityMatrix::product(n, n), {A::Both, A::None}, flat, 2, s);
        REQUIRE(rep.outcomes.size() == 2);
        CHECK(rep.outcomes[0].variable == VariableId('X', 1));
        CHECK(rep.outcomes[0].value == rep.outcomes[1].value);
    }
    CHECK(simulate_shot(DensityMatrix::singlet(), {A::None, A::None}, flat, 1, 0).outcomes.empty());

    const auto ladder = quarter_turn_ladder(LadderOrientation::Antipodal);
    const auto a = simulate_shot(DensityMatrix::singlet(), {A::Both, A::Both}, ladder, 9, 42);
    const auto b = simulate_shot(DensityMatrix::singlet(), {A::Both, A::Both}, ladder, 9, 42);
    CHECK(format_shot(a) == format_shot(b));
    CHECK(a.outcomes.size() == 4);
    CHECK_FALSE(a.outcome(VariableId('Z', 1)).has_value());
}

TEST_CASE("shot log format") {
    ShotRecord r;
    r.stream = 17;
    r.choice = {A::First, A::Both};
    r.outcomes = {{VariableId('X', 1), 1}, {VariableId('Y', 1), -1}, {VariableId('Y', 2), 1}};
    CHECK(format_shot(r) == "17 X1,Y1Y2 X1=+1 Y1=-1 Y2=+1");

    const auto log = simulate_schedule(DensityMatrix::singlet(), quarter_turn_ladder(LadderOrientation::Antipodal), 5, 9, 3);
    REQUIRE(log.size() == 9);
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(log[i].stream == 5 + i);
        CHECK(log[i].choice == data_yielding_choices()[(5 + i) % 9]);
    }
}

TEST_CASE("counter-based uniforms") {
    CHECK(counter_uniform(1, 2, 3) == counter_uniform(1, 2, 3));
    CHECK(counter_uniform(1, 2, 3) != counter_uniform(1, 2, 4));
    CHECK(counter_uniform(1, 2, 3) != counter_uniform(1, 3, 3));
    double sum = 0.0;
    for (std::uint64_t i = 0; i < 100000; ++i) {
        const double u = counter_uniform(7, i, 0);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
}

TEST_CASE("estimates are bit-identical across thread counts") {
    const auto rho = DensityMatrix::singlet();
    const auto ladder = quarter_turn_ladder(LadderOrientation::Antipodal);
    const char* saved = std::getenv("RSINEQ_THREADS");
    const std::string restore = saved ? saved : "";
    setenv("RSINEQ_THREADS", "1", 1);
    const auto one = estimate_f(rho, ladder, 200000, 77);
    setenv("RSINEQ_THREADS", "4", 1);
    const auto four = estimate_f(rho, ladder, 200000, 77);
    if (saved) setenv("RSINEQ_THREADS", restore.c_str(), 1);
    else unsetenv("RSINEQ_THREADS");

    CHECK(same_bits(one.f, four.f));
    CHECK(same_bits(one.standard_error, four.standard_error));
    REQUIRE(one.terms.size() == four.terms.size());
    for (std::size_t i = 0; i < one.terms.size(); ++i) {
        CHECK(same_bits(one.terms[i].mean, four.terms[i].mean));
        CHECK(one.terms[i].shots == four.terms[i].shots);
    }
}

TEST_CASE("estimate_f on the singlet, product and mixed states") {
    const auto antipodal = quarter_turn_ladder(LadderOrientation::Antipodal);
    const auto singlet = estimate_f(DensityMatrix::singlet(), antipodal, 1'000'000, 2024);
    CHECK(singlet.shots == 1'000'000);
    CHECK(singlet.terms.size() == 5);
    CHECK(std::abs(singlet.f - 2 * kSqrt2) < 3 * singlet.standard_error);
    for (const auto& t : singlet.terms) {
        CHECK(std::abs(t.mean) <= 1.0);
        CHECK(t.standard_error > 0.0);
    }

    const auto aligned = quarter_turn_ladder(LadderOrientation::Aligned);
    const auto product = DensityMatrix::product(aligned.y2, aligned.y2);
    const auto p = estimate_f(product, aligned, 1'000'000, 2025);
    CHECK(std::abs(p.f - 3 / kSqrt2) < 3 * p.standard_error);

    // Sequential terms do not depend on the state, so the mixed state keeps x1.x2 + y1.y2.
    const auto mixed = DensityMatrix::maximally_mixed(4);
    const auto m = estimate_f(mixed, aligned, 1'000'000, 2026);
    CHECK(analytic_f(mixed, aligned) == doctest::Approx(kSqrt2));
    CHECK(std::abs(m.f - analytic_f(mixed, aligned)) < 3 * m.standard_error);
    CHECK(std::abs(m.terms[static_cast<int>(L::X1Y2)].mean) < 3 * m.terms[static_cast<int>(L::X1Y2)].standard_error);
}

TEST_CASE("every correlator converges within 5 standard errors (property)") {
    // 100 seeded repetitions at 20k shots each keeps the suite fast; the 5-sigma band is shot-count invariant.
    const auto rho = DensityMatrix::singlet();
    const auto ladder = quarter_turn_ladder(LadderOrientation::Antipodal);
    int passing = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto est = estimate_f(rho, ladder, 20'000, 1000 + rep);
        bool ok = true;
        for (const auto& t : est.terms) {
            const double truth = analytic(t.label, rho, ladder);
            // A term with zero variance (sequential repeat of equal directions) must be exact.
            ok &= t.standard_error > 0 ? std::abs(t.mean - truth) < 5 * t.standard_error : std::abs(t.mean - truth) < 1e-12;
        }
        passing += ok;
    }
    CHECK(passing >= 99);
}

TEST_CASE("signaling test") {
    const auto aligned = quarter_turn_ladder(LadderOrientation::Aligned);
    const auto product = DensityMatrix::product(aligned.y2, aligned.y2);
    const auto r = signaling_test(product, aligned, 200'000, 5);
    CHECK(r.analytic_alone == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.analytic_after == doctest::Approx(0.75).epsilon(1e-12));
    const double c = std::cos(std::numbers::pi / 8), s = std::sin(std::numbers::pi / 8);
    CHECK(std::abs(r.analytic_after - (c * c * c * c + s * s * s * s)) <= 1e-12);
    CHECK(r.p_alone == 1.0);
    CHECK(std::abs(r.difference - 0.25) < 3 * r.se_difference);
    CHECK(r.z_score > 10);

    HybridSettings same = aligned;
    same.y1 = same.y2;
    const auto none = signaling_test(product, same, 50'000, 6);
    CHECK(none.difference == 0.0);
    CHECK(none.analytic_after == doctest::Approx(1.0));

    const auto mixed = signaling_test(DensityMatrix::maximally_mixed(4), aligned, 200'000, 7);
    CHECK(mixed.analytic_alone == doctest::Approx(0.5));
    CHECK(mixed.analytic_after == doctest::Approx(0.5));
    CHECK(std::abs(mixed.z_score) < 4);
}

TEST_CASE("no signaling between the parties") {
    // Alice's X1 marginal must not depend on whether Bob measures Y2 alone or Y1 then Y2.
    const auto rho = DensityMatrix::singlet();
    const auto ladder = quarter_turn_ladder(LadderOrientation::Antipodal);
    const std::uint64_t n = 200'000;
    double plus_a = 0.0, plus_b = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        plus_a += *simulate_shot(rho, {A::First, A::Second}, ladder, 31, i).outcome(VariableId('X', 1)) > 0;
        plus_b += *simulate_shot(rho, {A::First, A::Both}, ladder, 31, n + i).outcome(VariableId('X', 1)) > 0;
    }
    const double pa = plus_a / n, pb = plus_b / n;
    const double se = std::sqrt(pa * (1 - pa) / n + pb * (1 - pb) / n);
    CHECK(std::abs(pa - pb) / se < 4);
}
