#include "rsineq/report.hpp"

#include "rsineq/error.hpp"

#include <cmath>
#include <numbers>

namespace rsineq {

namespace fixtures {
const std::string_view chsh_rsx = "(X1 - Y1 - Y2)^2 + (X2 - Y1 + Y2)^2 >= 2\n";
const std::string_view kcbs_rsx = "(X1 + X2 + X3)^2 + (X3 + X4 + X5)^2 + (X1 - X3 + X5)^2 >= 3\n";
const std::string_view cycle7_rsx =
    "(X1 + X2 + X3)^2 + (X3 + X4 + X5)^2 + (X5 + X6 + X7)^2 + (X1 - X3 + X5)^2 + (X1 - X5 + X7)^2 + 5 >= 0\n";
const std::string_view chained_alternating5_rsx = "(X1 - X2 + X3)^2 + (X3 - X4 + X5)^2 + (X1 - X3 + X5)^2 >= 3\n";
const std::string_view lg_rsx = "(L - K - M)^2 + (J - K + M)^2 >= 2\n";
const std::string_view hybrid_rsx = "(X2 - X1 + Y1)^2 + (X1 - Y2 + Y1)^2 >= 2\n";
const std::string_view monogamy_rsx =
    "{(X3 + Y1 + Y2)^2 + (X1 + Y1 - Y2)^2}\n"
    "  + {(X1 + X2 + X3)^2 + (X3 + X4 + X5)^2 + (X1 - X3 + X5)^2} >= 5\n";

const std::string_view chsh_scn =
    "variables: X1, X2, Y1, Y2\n"
    "context: X1, Y1\n"
    "context: X1, Y2\n"
    "context: X2, Y1\n"
    "context: X2, Y2\n";
const std::string_view kcbs_scn =
    "variables: X1, X2, X3, X4, X5\n"
    "context: X1, X2\n"
    "context: X2, X3\n"
    "context: X3, X4\n"
    "context: X4, X5\n"
    "context: X5, X1\n";
const std::string_view lg_scn =
    "variables: J, K, L, M\n"
    "party S: J, K, L, M\n"
    "sequential: J -> K\n"
    "sequential: K -> L\n"
    "sequential: L -> M\n"
    "sequential: J -> M\n";
const std::string_view hybrid_scn =
    "variables: X1, X2, Y1, Y2\n"
    "context: X1, Y1\n"
    "context: X1, Y2\n"
    "context: X2, Y1\n"
    "context: X2, Y2\n"
    "sequential: X1 -> X2\n"
    "sequential: Y1 -> Y2\n";
const std::string_view monogamy_scn =
    "variables: X1, X2, X3, X4, X5, Y1, Y2\n"
    "context: X1, X2\n"
    "context: X2, X3\n"
    "context: X3, X4\n"
    "context: X4, X5\n"
    "context: X5, X1\n"
    "context: X1, Y1\ncontext: X2, Y1\ncontext: X3, Y1\ncontext: X4, Y1\ncontext: X5, Y1\n"
    "context: X1, Y2\ncontext: X2, Y2\ncontext: X3, Y2\ncontext: X4, Y2\ncontext: X5, Y2\n";

const std::string_view chsh_singlet_obs =
    "X1 Y1 = 0.70710678118654752\n"
    "X1 Y2 = 0.70710678118654752\n"
    "X2 Y1 = 0.70710678118654752\n"
    "X2 Y2 = -0.70710678118654752\n";
const std::string_view chsh_classical_obs =
    "X1 Y1 = 1\n"
    "X1 Y2 = 1\n"
    "X2 Y1 = 1\n"
    "X2 Y2 = 1\n";
}  // namespace fixtures

Json measured(double value, double tolerance) { return Json{{"value", value}, {"tolerance", tolerance}}; }

Json estimated(double value, double standard_error) { return Json{{"value", value}, {"stderr", standard_error}}; }

Json exact(const Rational& value) {
    return Json{{"value", value.to_double()}, {"exact", value.str()}, {"tolerance", 0.0}};
}

namespace {

std::string assignment_text(const DeterministicAssignment& a) {
    std::string s;
    for (const auto& [v, x] : a.values) {
        if (!s.empty()) s += ' ';
        s += v.str() + (x > 0 ? "=+1" : "=-1");
    }
    return s;
}

std::string_view bound_source_name(BoundSource s) { return s == BoundSource::Stated ? "stated" : "implied"; }

std::string_view warning_name(DerivationWarning w) {
    return w == DerivationWarning::EvenGroup ? "even-group" : "stated-bound-exceeds-implied";
}

Check compare(std::string name, double expected, double actual, double tolerance) {
    Check c{std::move(name), std::abs(actual - expected) <= tolerance, {}};
    c.detail = {{"expected", expected}, {"actual", actual}, {"tolerance", tolerance}};
    return c;
}

Check require(std::string name, bool ok, Json detail = Json::object()) { return {std::move(name), ok, std::move(detail)}; }

CorrelationTerm term(std::string_view a, std::string_view b, std::int64_t c) {
    CorrelationTerm t{VariableId::parse(a), VariableId::parse(b), c, TermKind::CrossParty};
    if (t.second < t.first) std::swap(t.first, t.second);
    t.kind = t.first.party == t.second.party ? TermKind::SameParty : TermKind::CrossParty;
    return t;
}

std::string terms_text(const CorrelationInequality& ineq) {
    std::string s;
    for (const auto& t : ineq.terms) {
        s += (t.coefficient < 0 ? "-" : "+") + std::to_string(std::abs(t.coefficient)) + t.first.str() + t.second.str();
    }
    return s;
}

const double kSqrt2 = std::numbers::sqrt2;

ReproduceResult chsh_bound() {
    ReproduceResult r{"chsh-bound", {}};
    const auto ineq = derive_inequality(parse_rs(fixtures::chsh_rsx));
    r.checks.push_back(require("terms are <X1Y1>+<X1Y2>+<X2Y1>-<X2Y2>", terms_text(ineq) == "+1X1Y1+1X1Y2+1X2Y1-1X2Y2",
                               {{"actual", ineq.str()}}));
    r.checks.push_back(require("direction <= and bound 2",
                               ineq.direction == Comparator::LessEq && ineq.bound == Rational(2), inequality_json(ineq)));
    const auto ext = classical_extrema(ineq);
    r.checks.push_back(compare("classical max", 2, static_cast<double>(ext.max), 0.0));
    r.checks.push_back(compare("classical min", -2, static_cast<double>(ext.min), 0.0));
    const auto cls = classify(ineq, parse_scenario(fixtures::chsh_scn));
    r.checks.push_back(require("classified spatial", cls.kind == InequalityKind::Spatial));
    return r;
}

ReproduceResult kcbs_bound() {
    ReproduceResult r{"kcbs-bound", {}};
    const auto ineq = derive_inequality(parse_rs(fixtures::kcbs_rsx));
    r.checks.push_back(require("terms are the 5-cycle", terms_text(ineq) == "+1X1X2+1X1X5+1X2X3+1X3X4+1X4X5",
                               {{"actual", ineq.str()}}));
    r.checks.push_back(require("direction >= and bound -3",
                               ineq.direction == Comparator::GreaterEq && ineq.bound == Rational(-3), inequality_json(ineq)));
    r.checks.push_back(compare("classical min", -3, static_cast<double>(classical_extrema(ineq).min), 0.0));
    r.checks.push_back(require("classified contextual",
                               classify(ineq, parse_scenario(fixtures::kcbs_scn)).kind == InequalityKind::Contextual));
    return r;
}

ReproduceResult ncycle_bounds() {
    ReproduceResult r{"ncycle-bounds", {}};
    const auto seven = derive_inequality(parse_rs(fixtures::cycle7_rsx));
    r.checks.push_back(require("7-cycle terms", terms_text(seven) == "+1X1X2+1X1X7+1X2X3+1X3X4+1X4X5+1X5X6+1X6X7",
                               {{"actual", seven.str()}}));
    r.checks.push_back(require("7-cycle bound -5", seven.direction == Comparator::GreaterEq && seven.bound == Rational(-5),
                               inequality_json(seven)));
    r.checks.push_back(compare("7-cycle classical min", -5, static_cast<double>(classical_extrema(seven).min), 0.0));
    for (int n : {5, 7, 9, 11}) {
        const auto plain = derive_inequality(chained_cycle_source(n, false));
        const auto ext = classical_extrema(plain);
        r.checks.push_back(require("n=" + std::to_string(n) + " cycle >= -(n-2)",
                                   plain.direction == Comparator::GreaterEq && plain.bound == Rational(2 - n) &&
                                       ext.min == 2 - n,
                                   {{"inequality", plain.str()}, {"classical_min", ext.min}}));
        const auto alt = derive_inequality(chained_cycle_source(n, true));
        const auto ext_alt = classical_extrema(alt);
        r.checks.push_back(require("n=" + std::to_string(n) + " path - closing edge <= n-2",
                                   alt.direction == Comparator::LessEq && alt.bound == Rational(n - 2) &&
                                       ext_alt.max == n - 2,
                                   {{"inequality", alt.str()}, {"classical_max", ext_alt.max}}));
    }
    return r;
}

ReproduceResult lg_bound() {
    ReproduceResult r{"lg-bound", {}};
    const auto ineq = derive_inequality(parse_rs(fixtures::lg_rsx));
    r.checks.push_back(require("terms are <JK>+<KL>+<LM>-<JM>", terms_text(ineq) == "+1JK-1JM+1KL+1LM",
                               {{"actual", ineq.str()}}));
    r.checks.push_back(require("direction <= and bound 2",
                               ineq.direction == Comparator::LessEq && ineq.bound == Rational(2), inequality_json(ineq)));
    r.checks.push_back(compare("classical max", 2, static_cast<double>(classical_extrema(ineq).max), 0.0));
    r.checks.push_back(require("classified temporal",
                               classify(ineq, parse_scenario(fixtures::lg_scn)).kind == InequalityKind::Temporal));
    return r;
}

CorrelationInequality hybrid_inequality() { return derive_inequality(parse_rs(fixtures::hybrid_rsx)); }

ReproduceResult hybrid_singlet() {
    ReproduceResult r{"hybrid-singlet", {}};
    const auto ineq = hybrid_inequality();
    const auto scenario = parse_scenario(fixtures::hybrid_scn);
    const auto assignment = assign_terms(ineq, scenario);
    const auto singlet = DensityMatrix::singlet();

    const auto ladder = quarter_turn_ladder(LadderOrientation::Antipodal);
    r.checks.push_back(compare("antipodal pi/4 ladder value", 2 * kSqrt2,
                               evaluate_inequality_quantum(ineq, singlet, ladder.as_map(), assignment), 1e-12));

    SettingsParametrization param;
    param.variables = ineq.variables();
    param.fixed_state = singlet;
    const auto best = maximize_violation(ineq, assignment, param);
    const double norm = operator_norm(correlation_operator(ineq, best.settings, assignment));
    r.checks.push_back(compare("optimizer maximum", 2 * kSqrt2, best.value, 1e-6));
    r.checks.push_back(compare("operator norm at optimum", best.value, norm, 1e-9));
    r.checks.back().detail["optimization"] = optimization_json(best, norm);
    return r;
}

ReproduceResult hybrid_product() {
    ReproduceResult r{"hybrid-product", {}};
    const auto ineq = hybrid_inequality();
    const auto assignment = assign_terms(ineq, parse_scenario(fixtures::hybrid_scn));
    const auto ladder = quarter_turn_ladder(LadderOrientation::Aligned);
    const double analytic = hybrid_f_product(ladder.y2, ladder.y2, ladder);
    const double matrix =
        evaluate_inequality_quantum(ineq, DensityMatrix::product(ladder.y2, ladder.y2), ladder.as_map(), assignment);
    r.checks.push_back(compare("closed form at nA = nB = y2", 3.0 / kSqrt2, analytic, 1e-12));
    r.checks.push_back(compare("matrix path agrees", analytic, matrix, 1e-12));
    r.checks.push_back(require("violates the classical bound 2", analytic > 2.0));
    return r;
}

ReproduceResult tsirelson_envelope_target(std::size_t grid) {
    ReproduceResult r{"tsirelson-envelope", {}};
    const auto scan = scan_envelope(grid);
    r.checks.push_back(compare("grid maximum", 2 * kSqrt2, scan.max, 1e-5));
    r.checks.push_back(require("maximum <= 2 sqrt2 + 1e-12 everywhere", scan.max <= 2 * kSqrt2 + 1e-12,
                               {{"max", scan.max}, {"resolution", grid}}));
    bool found = false;
    for (const auto& p : scan.argmax) {
        found |= std::abs(p.theta1 - std::numbers::pi / 4) < 1e-9 && std::abs(p.theta2 + std::numbers::pi / 4) < 1e-9;
    }
    const double at_point = tsirelson_envelope(std::numbers::pi / 4, -std::numbers::pi / 4);
    r.checks.push_back(compare("value at (pi/4, -pi/4)", 2 * kSqrt2, at_point, 1e-12));
    // (pi/4, -pi/4) lies on the periodic grid only when the resolution is a multiple of 8.
    r.checks.push_back(require("(pi/4, -pi/4) among grid maximizers", found || grid % 8 != 0,
                               {{"argmax_count", scan.argmax.size()}}));
    return r;
}

ReproduceResult s2_identity() {
    ReproduceResult r{"s2-identity", {}};
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto s = random_hybrid_settings(kDefaultSeed, i);
        const auto f = build_f_operator(s);
        worst = std::max(worst, (f.s2 * f.s2).max_abs_diff(s2_squared_closed_form(s)));
    }
    r.checks.push_back(compare("max element-wise deviation over 100 settings", 0.0, worst, 1e-12));
    return r;
}

ReproduceResult monogamy_target() {
    ReproduceResult r{"monogamy", {}};
    const auto scenario = parse_scenario(fixtures::monogamy_scn);
    const std::vector<CorrelationTerm> chsh{term("X3", "Y1", 1), term("X3", "Y2", 1), term("X1", "Y1", 1),
                                            term("X1", "Y2", -1)};
    const std::vector<CorrelationTerm> kcbs{term("X1", "X2", 1), term("X2", "X3", 1), term("X3", "X4", 1),
                                            term("X4", "X5", 1), term("X1", "X5", 1)};
    const auto report = monogamy_check(scenario, chsh, kcbs, parse_rs(fixtures::monogamy_rsx));
    r.checks.push_back(compare("no-disturbance LP minimum", -5.0, report.lp_minimum, 1e-7));
    r.checks.push_back(require("symbolic bound -5 from the source",
                               report.source_matches_terms && report.symbolic_bound == Rational(-5)));
    r.checks.push_back(compare("classical minimum", -5.0, static_cast<double>(report.classical_minimum), 0.0));
    r.checks.push_back(require("relaxed LP goes below -5", report.relaxed_minimum < -5.0 - 1e-7,
                               {{"relaxed_minimum", measured(report.relaxed_minimum, 1e-7)}}));
    r.checks.push_back(require("agreement", report.agreement));
    return r;
}

ReproduceResult protocol_mc(const ReproduceOptions& options) {
    ReproduceResult r{"protocol-mc", {}};
    const auto est =
        estimate_f(DensityMatrix::singlet(), quarter_turn_ladder(LadderOrientation::Antipodal), options.shots, options.seed);
    Check f = compare("F within 3 stderr of 2 sqrt2", 2 * kSqrt2, est.f, 3.0 * est.standard_error);
    f.detail["estimate"] = f_estimate_json(est);
    r.checks.push_back(std::move(f));

    const auto ladder = quarter_turn_ladder(LadderOrientation::Aligned);
    const auto sig = signaling_test(DensityMatrix::product(ladder.y2, ladder.y2), ladder, options.shots, options.seed);
    r.checks.push_back(compare("analytic P(Y2=+) alone", 1.0, sig.analytic_alone, 1e-12));
    r.checks.push_back(compare("analytic P(Y2=+) after Y1", 0.75, sig.analytic_after, 1e-12));
    Check gap = compare("signaling gap within 3 stderr of 0.25", 0.25, sig.difference, 3.0 * sig.se_difference);
    gap.detail["report"] = signaling_json(sig);
    r.checks.push_back(std::move(gap));
    return r;
}

}  // namespace

Json inequality_json(const CorrelationInequality& ineq) {
    Json terms = Json::array();
    for (const auto& t : ineq.terms) {
        terms.push_back({{"first", t.first.str()},
                         {"second", t.second.str()},
                         {"coefficient", t.coefficient},
                         {"kind", term_kind_name(t.kind)}});
    }
    Json warnings = Json::array();
    for (auto w : ineq.warnings) warnings.push_back(warning_name(w));
    Json j{{"text", ineq.str()},
           {"terms", terms},
           {"direction", comparator_symbol(ineq.direction)},
           {"bound", exact(ineq.bound)},
           {"bound_source", bound_source_name(ineq.bound_source)},
           {"expansion_constant", ineq.expansion_constant},
           {"orientation", ineq.orientation},
           {"warnings", warnings}};
    if (ineq.provenance) j["source"] = format_rs(*ineq.provenance);
    return j;
}

Json derive_report(const RsExpression& expr, const std::optional<ScenarioSpec>& scenario) {
    const auto ineq = derive_inequality(expr);
    Json groups = Json::array();
    for (const auto& g : validate_odd_groups(expr)) {
        groups.push_back({{"terms", g.term_count}, {"odd", g.odd}, {"implied_lower_bound", g.implied_lower_bound}});
    }
    const auto ext = classical_extrema(ineq);
    Json j{{"inequality", inequality_json(ineq)},
           {"groups", groups},
           {"implied_lhs_bound", implied_lhs_bound(expr)},
           {"classical",
            {{"min", exact(Rational(ext.min))},
             {"max", exact(Rational(ext.max))},
             {"argmin", assignment_text(ext.argmin)},
             {"argmax", assignment_text(ext.argmax)},
             {"holds", holds_classically(ineq)}}}};
    if (scenario) {
        const auto cls = classify(ineq, *scenario);
        Json per = Json::array();
        for (std::size_t i = 0; i < ineq.terms.size(); ++i) {
            per.push_back({{"term", ineq.terms[i].first.str() + ineq.terms[i].second.str()},
                           {"realization", term_realization_name(cls.per_term[i])}});
        }
        j["classification"] = {{"kind", inequality_kind_name(cls.kind)}, {"terms", per}};
    }
    return j;
}

Json check_report(const ScenarioSpec& scenario, const Observations& observed, const FeasibilityResult& result) {
    Json obs = Json::array();
    for (const auto& c : observed.correlators) {
        obs.push_back({{"term", c.first.str() + c.second.str()}, {"value", c.value}, {"tolerance", 0.0}});
    }
    for (const auto& m : observed.means) obs.push_back({{"term", m.variable.str()}, {"value", m.value}, {"tolerance", 0.0}});
    Json j{{"scenario", format_scenario(scenario)}, {"observations", obs}, {"feasible", result.feasible}};
    if (result.witness_model) {
        Json support = Json::array();
        for (const auto& w : result.witness_model->support) {
            support.push_back({{"assignment", assignment_text(w.assignment)}, {"weight", measured(w.weight, 1e-9)}});
        }
        j["witness"] = {{"support", support}, {"max_residual", measured(result.max_residual, 1e-9)}};
    }
    if (result.certificate) {
        Json terms = Json::array();
        for (const auto& t : result.certificate->terms) {
            std::string label;
            for (const auto& v : t.variables) label += v.str();
            terms.push_back({{"term", label}, {"coefficient", measured(t.coefficient, 1e-9)}});
        }
        j["certificate"] = {{"terms", terms},
                            {"classical_bound", measured(result.certificate->classical_bound, 1e-9)},
                            {"observed_value", measured(result.certificate->observed_value, 1e-9)}};
    }
    return j;
}

Json optimization_json(const OptimizationResult& result, double operator_norm_at_best) {
    Json settings = Json::object();
    for (const auto& [v, b] : result.settings) settings[v.str()] = {b.x(), b.y(), b.z()};
    return {{"value", measured(result.value, 1e-6)},
            {"operator_norm", measured(operator_norm_at_best, 1e-9)},
            {"parameters", result.parameters},
            {"settings", settings},
            {"evaluations", result.evaluations},
            {"grid_points_per_angle", result.grid_points_per_angle},
            {"converged", result.converged()}};
}

Json f_estimate_json(const FEstimate& estimate) {
    Json terms = Json::object();
    for (const auto& t : estimate.terms) {
        terms[std::string(correlator_label_name(t.label))] = {
            {"mean", estimated(t.mean, t.standard_error)}, {"shots", t.shots}};
    }
    return {{"terms", terms}, {"F", estimated(estimate.f, estimate.standard_error)}, {"shots", estimate.shots}};
}

Json signaling_json(const SignalingReport& report) {
    return {{"p_alone", estimated(report.p_alone, report.se_alone)},
            {"p_after", estimated(report.p_after, report.se_after)},
            {"difference", estimated(report.difference, report.se_difference)},
            {"z_score", report.z_score},
            {"analytic_alone", measured(report.analytic_alone, 1e-12)},
            {"analytic_after", measured(report.analytic_after, 1e-12)},
            {"shots_per_arm", report.shots_per_arm}};
}

bool ReproduceResult::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Json ReproduceResult::to_json() const {
    Json list = Json::array();
    for (const auto& c : checks) list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"target", target}, {"passed", passed()}, {"checks", list}};
}

const std::vector<std::string>& reproduce_targets() {
    static const std::vector<std::string> targets{"chsh-bound",     "kcbs-bound",        "ncycle-bounds",
                                                  "lg-bound",       "hybrid-singlet",    "hybrid-product",
                                                  "tsirelson-envelope", "s2-identity", "monogamy",
                                                  "protocol-mc"};
    return targets;
}

ReproduceResult reproduce(std::string_view target, const ReproduceOptions& options) {
    if (target == "chsh-bound") return chsh_bound();
    if (target == "kcbs-bound") return kcbs_bound();
    if (target == "ncycle-bounds") return ncycle_bounds();
    if (target == "lg-bound") return lg_bound();
    if (target == "hybrid-singlet") return hybrid_singlet();
    if (target == "hybrid-product") return hybrid_product();
    if (target == "tsirelson-envelope") return tsirelson_envelope_target(options.envelope_grid);
    if (target == "s2-identity") return s2_identity();
    if (target == "monogamy") return monogamy_target();
    if (target == "protocol-mc") return protocol_mc(options);
    throw Error(ErrorCode::InvalidArgument, "unknown target '" + std::string(target) + "'");
}

HybridSettings random_hybrid_settings(std::uint64_t seed, std::uint64_t stream) {
    auto direction = [&](std::uint64_t k) {
        const double u = counter_uniform(seed, stream, 2 * k), v = counter_uniform(seed, stream, 2 * k + 1);
        return BlochVector::spherical(std::acos(1.0 - 2.0 * u), 2.0 * std::numbers::pi * v);
    };
    return {direction(0), direction(1), direction(2), direction(3)};
}

std::vector<ObservedCorrelator> chsh_correlators(const DensityMatrix& rho, const Settings& settings) {
    std::vector<ObservedCorrelator> out;
    for (const char* x : {"X1", "X2"}) {
        for (const char* y : {"Y1", "Y2"}) {
            const VariableId a = VariableId::parse(x), b = VariableId::parse(y);
            out.push_back({a, b, spatial_correlator(rho, settings.at(a), settings.at(b))});
        }
    }
    return out;
}

}  // namespace rsineq
