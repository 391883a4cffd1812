#include "rsineq/lhv.hpp"

#include "rsineq/error.hpp"
#include "rsineq/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>

namespace rsineq {

int DeterministicAssignment::at(const VariableId& v) const {
    auto it = values.find(v);
    if (it == values.end()) throw Error(ErrorCode::UnknownVariable, v.str() + " not in assignment");
    return it->second;
}

void DhvModel::validate() const {
    double total = 0.0;
    for (const auto& [assignment, w] : support) {
        if (!(w >= 0.0)) throw Error(ErrorCode::InvalidDistribution, "negative or NaN weight");
        if (assignment.values.size() != variables.size()) {
            throw Error(ErrorCode::InvalidDistribution, "assignment is not total over the model variables");
        }
        for (const auto& v : variables) {
            const int x = assignment.at(v);
            if (x != 1 && x != -1) throw Error(ErrorCode::InvalidDistribution, "assignment values must be +-1");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::InvalidDistribution, "weights sum to " + std::to_string(total));
    }
}

double DhvModel::correlator(const VariableId& a, const VariableId& b) const {
    double s = 0.0;
    for (const auto& [assignment, w] : support) s += w * assignment.at(a) * assignment.at(b);
    return s;
}

double DhvModel::mean(const VariableId& a) const {
    double s = 0.0;
    for (const auto& [assignment, w] : support) s += w * assignment.at(a);
    return s;
}

// ---------------------------------------------------------------------------

JointDistribution::JointDistribution(std::vector<VariableId> variables, std::vector<double> probabilities,
                                     double tolerance)
    : variables_(std::move(variables)), probabilities_(std::move(probabilities)) {
    if (variables_.size() > 30) throw Error(ErrorCode::TooManyVariables, "joint distribution over > 30 variables");
    if (probabilities_.size() != (std::size_t{1} << variables_.size())) {
        throw Error(ErrorCode::DimensionMismatch, "table size does not match 2^n");
    }
    if (std::set<VariableId>(variables_.begin(), variables_.end()).size() != variables_.size()) {
        throw Error(ErrorCode::InvalidDistribution, "repeated variable");
    }
    double total = 0.0;
    for (double p : probabilities_) {
        if (!(p >= -tolerance)) throw Error(ErrorCode::InvalidDistribution, "negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > tolerance) {
        throw Error(ErrorCode::InvalidDistribution, "probabilities sum to " + std::to_string(total));
    }
}

std::optional<std::size_t> JointDistribution::position(const VariableId& v) const {
    auto it = std::find(variables_.begin(), variables_.end(), v);
    if (it == variables_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - variables_.begin());
}

int JointDistribution::value(std::size_t outcome, std::size_t pos) const {
    const std::size_t bit = variables_.size() - 1 - pos;
    return ((outcome >> bit) & 1U) ? 1 : -1;
}

std::size_t JointDistribution::index_of(const std::map<VariableId, int>& outcome) const {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < variables_.size(); ++p) {
        auto it = outcome.find(variables_[p]);
        if (it == outcome.end()) throw Error(ErrorCode::UnknownVariable, variables_[p].str() + " missing from outcome");
        idx = (idx << 1) | (it->second > 0 ? 1U : 0U);
    }
    return idx;
}

double JointDistribution::probability(const std::map<VariableId, int>& outcome) const {
    return probabilities_[index_of(outcome)];
}

JointDistribution JointDistribution::marginal(const std::vector<VariableId>& keep) const {
    std::vector<std::size_t> pos;
    for (const auto& v : keep) {
        auto p = position(v);
        if (!p) throw Error(ErrorCode::UnknownVariable, v.str() + " not in distribution");
        pos.push_back(*p);
    }
    std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
    for (std::size_t o = 0; o < probabilities_.size(); ++o) {
        std::size_t idx = 0;
        for (std::size_t p : pos) idx = (idx << 1) | (value(o, p) > 0 ? 1U : 0U);
        out[idx] += probabilities_[o];
    }
    return JointDistribution(keep, std::move(out), 1e-9);
}

// ---------------------------------------------------------------------------

namespace {

DeterministicAssignment assignment_from_bits(const std::vector<VariableId>& vars, std::uint64_t bits) {
    DeterministicAssignment a;
    const std::size_t n = vars.size();
    for (std::size_t p = 0; p < n; ++p) a.values[vars[p]] = ((bits >> (n - 1 - p)) & 1U) ? 1 : -1;
    return a;
}

std::uint64_t bits_from_assignment(const std::vector<VariableId>& vars, const DeterministicAssignment& a) {
    std::uint64_t bits = 0;
    for (const auto& v : vars) bits = (bits << 1) | (a.at(v) > 0 ? 1U : 0U);
    return bits;
}

}  // namespace

ClassicalExtrema classical_extrema(const MultilinearPoly& poly) {
    ClassicalExtrema out;
    out.variables = poly.variables();
    const std::size_t n = out.variables.size();
    if (n > kExtremaVariableCap) {
        throw Error(ErrorCode::TooManyVariables,
                    std::to_string(n) + " variables exceeds the enumeration cap of " + std::to_string(kExtremaVariableCap));
    }
    struct Packed {
        std::uint64_t mask;
        std::int64_t coefficient;
    };
    std::vector<Packed> packed;
    for (const auto& [vars, c] : poly.terms()) {
        std::uint64_t mask = 0;
        for (const auto& v : vars) {
            const auto p = static_cast<std::size_t>(std::find(out.variables.begin(), out.variables.end(), v) -
                                                    out.variables.begin());
            mask |= std::uint64_t{1} << (n - 1 - p);
        }
        packed.push_back({mask, c});
    }

    const std::uint64_t total = std::uint64_t{1} << n;
    const std::uint64_t block = std::uint64_t{1} << 14;
    const std::size_t blocks = static_cast<std::size_t>((total + block - 1) / block);
    struct Partial {
        std::int64_t min = std::numeric_limits<std::int64_t>::max();
        std::int64_t max = std::numeric_limits<std::int64_t>::min();
        std::uint64_t argmin = 0, argmax = 0;
    };
    std::vector<Partial> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        Partial p;
        const std::uint64_t lo = b * block, hi = std::min(total, lo + block);
        for (std::uint64_t o = lo; o < hi; ++o) {
            std::int64_t v = 0;
            for (const auto& m : packed) {
                // bits set in mask but clear in o are -1 factors
                v += (std::popcount(m.mask & ~o) & 1) ? -m.coefficient : m.coefficient;
            }
            if (v < p.min) { p.min = v; p.argmin = o; }
            if (v > p.max) { p.max = v; p.argmax = o; }
        }
        partial[b] = p;
    });
    Partial best;
    for (const auto& p : partial) {  // block order keeps the lexicographically smallest witness
        if (p.min < best.min) { best.min = p.min; best.argmin = p.argmin; }
        if (p.max > best.max) { best.max = p.max; best.argmax = p.argmax; }
    }
    out.min = best.min;
    out.max = best.max;
    out.argmin = assignment_from_bits(out.variables, best.argmin);
    out.argmax = assignment_from_bits(out.variables, best.argmax);
    return out;
}

ClassicalExtrema classical_extrema(const CorrelationInequality& ineq) {
    return classical_extrema(ineq.lhs());
}

bool holds_classically(const CorrelationInequality& ineq) {
    const auto ext = classical_extrema(ineq);
    return ineq.direction == Comparator::LessEq ? Rational(ext.max) <= ineq.bound : Rational(ext.min) >= ineq.bound;
}

JointDistribution dhv_to_jd(const DhvModel& model) {
    model.validate();
    if (model.variables.size() > 30) throw Error(ErrorCode::TooManyVariables, "model over > 30 variables");
    std::vector<double> table(std::size_t{1} << model.variables.size(), 0.0);
    for (const auto& [assignment, w] : model.support) table[bits_from_assignment(model.variables, assignment)] += w;
    return JointDistribution(model.variables, std::move(table));
}

double correlator_from_jd(const JointDistribution& jd, const VariableId& a, const VariableId& b) {
    const auto pa = jd.position(a), pb = jd.position(b);
    if (!pa) throw Error(ErrorCode::UnknownVariable, a.str() + " not in distribution");
    if (!pb) throw Error(ErrorCode::UnknownVariable, b.str() + " not in distribution");
    double s = 0.0;
    const auto& p = jd.probabilities();
    for (std::size_t o = 0; o < p.size(); ++o) s += p[o] * jd.value(o, *pa) * jd.value(o, *pb);
    return s;
}

double mean_from_jd(const JointDistribution& jd, const VariableId& a) {
    const auto pa = jd.position(a);
    if (!pa) throw Error(ErrorCode::UnknownVariable, a.str() + " not in distribution");
    double s = 0.0;
    const auto& p = jd.probabilities();
    for (std::size_t o = 0; o < p.size(); ++o) s += p[o] * jd.value(o, *pa);
    return s;
}

// ---------------------------------------------------------------------------

namespace {

struct ObservationRow {
    std::vector<std::size_t> positions;  // one or two
    std::vector<VariableId> variables;
    double value;
};

int outcome_product(std::uint64_t o, std::size_t n, const std::vector<std::size_t>& positions) {
    int s = 1;
    for (std::size_t p : positions) s *= ((o >> (n - 1 - p)) & 1U) ? 1 : -1;
    return s;
}

}  // namespace

FeasibilityResult jd_feasibility(const ScenarioSpec& scenario, const Observations& observed,
                                 const FeasibilityOptions& options) {
    const auto& vars = scenario.variables;
    const std::size_t n = vars.size();
    if (n > kFeasibilityVariableCap) {
        throw Error(ErrorCode::TooManyVariables, std::to_string(n) + " variables exceeds the feasibility cap of " +
                                                     std::to_string(kFeasibilityVariableCap));
    }
    auto pos = [&](const VariableId& v) {
        auto it = std::find(vars.begin(), vars.end(), v);
        if (it == vars.end()) throw Error(ErrorCode::UndeclaredVariable, v.str() + " is not in the scenario");
        return static_cast<std::size_t>(it - vars.begin());
    };
    auto check_value = [](double x) {
        if (!(x >= -1.0 - 1e-12 && x <= 1.0 + 1e-12)) {
            throw Error(ErrorCode::InvalidObservation, "expectation " + std::to_string(x) + " outside [-1, 1]");
        }
    };
    std::vector<ObservationRow> obs;
    for (const auto& c : observed.correlators) {
        check_value(c.value);
        obs.push_back({{pos(c.first), pos(c.second)}, {c.first, c.second}, c.value});
    }
    for (const auto& m : observed.means) {
        check_value(m.value);
        obs.push_back({{pos(m.variable)}, {m.variable}, m.value});
    }

    // Columns are the 2^n deterministic assignments; rows fix normalization and each observation.
    const std::size_t cols = std::size_t{1} << n;
    LpProblem lp;
    lp.sense = ObjectiveSense::Minimize;
    lp.objective.assign(cols, 0.0);
    lp.add_row(std::vector<double>(cols, 1.0), RowSense::Equal, 1.0);
    for (const auto& r : obs) {
        std::vector<double> row(cols);
        for (std::size_t o = 0; o < cols; ++o) row[o] = outcome_product(o, n, r.positions);
        lp.add_row(std::move(row), RowSense::Equal, r.value);
    }
    SimplexOptions sopt;
    sopt.feasibility_tolerance = options.tolerance;
    const LpSolution sol = simplex_solve(lp, sopt);

    FeasibilityResult result;
    if (sol.status == LpStatus::Optimal) {
        DhvModel model;
        model.variables = vars;
        double total = 0.0;
        for (std::size_t o = 0; o < cols; ++o) {
            if (sol.x[o] > 1e-15) total += sol.x[o];
        }
        for (std::size_t o = 0; o < cols; ++o) {
            if (sol.x[o] > 1e-15) model.support.push_back({assignment_from_bits(vars, o), sol.x[o] / total});
        }
        JointDistribution jd = dhv_to_jd(model);
        for (const auto& r : obs) {
            const double v = r.positions.size() == 2 ? correlator_from_jd(jd, r.variables[0], r.variables[1])
                                                     : mean_from_jd(jd, r.variables[0]);
            result.max_residual = std::max(result.max_residual, std::abs(v - r.value));
        }
        result.feasible = true;
        result.witness_model = std::move(model);
        result.witness = std::move(jd);
        return result;
    }

    // Farkas dual: max y0 + sum_k y_k E_k  s.t.  y0 + sum_k y_k o_k(lambda) <= 0 for all lambda, |y_k| <= 1.
    const std::size_t k = obs.size();
    LpProblem dual;
    dual.sense = ObjectiveSense::Maximize;
    dual.objective.assign(k + 1, 0.0);
    dual.objective[0] = 1.0;
    for (std::size_t i = 0; i < k; ++i) dual.objective[i + 1] = obs[i].value;
    dual.lower.assign(k + 1, -1.0);
    dual.upper.assign(k + 1, 1.0);
    dual.lower[0] = -kInfinity;
    dual.upper[0] = kInfinity;
    for (std::size_t o = 0; o < cols; ++o) {
        std::vector<double> row(k + 1);
        row[0] = 1.0;
        for (std::size_t i = 0; i < k; ++i) row[i + 1] = outcome_product(o, n, obs[i].positions);
        dual.add_row(std::move(row), RowSense::LessEq, 0.0);
    }
    const LpSolution cert = simplex_solve(dual, sopt);
    if (cert.status != LpStatus::Optimal) {
        throw Error(ErrorCode::NumericalBreakdown, "certificate LP did not reach an optimum");
    }
    FeasibilityCertificate c;
    for (std::size_t i = 0; i < k; ++i) {
        if (std::abs(cert.x[i + 1]) > 1e-12) c.terms.push_back({obs[i].variables, cert.x[i + 1]});
    }
    c.classical_bound = -cert.x[0];
    c.observed_value = cert.objective - cert.x[0];
    result.feasible = false;
    result.certificate = std::move(c);
    return result;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<VariableId>> measurement_contexts(const ScenarioSpec& scenario, ContextMode mode) {
    const auto& vars = scenario.variables;
    const std::size_t n = vars.size();
    auto index = [&](const VariableId& v) {
        return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin());
    };
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> covered(n, false);

    if (mode == ContextMode::Declared) {
        for (const auto& ctx : scenario.contexts) {
            std::vector<std::size_t> c;
            for (const auto& v : ctx) c.push_back(index(v));
            std::sort(c.begin(), c.end());
            for (auto i : c) covered[i] = true;
            out.push_back(std::move(c));
        }
    } else {
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (const auto& ctx : scenario.contexts) {
            for (const auto& a : ctx) {
                for (const auto& b : ctx) {
                    if (a != b) adj[index(a)][index(b)] = true;
                }
            }
        }
        // Bron-Kerbosch with pivoting; vertex sets kept sorted for deterministic output.
        std::function<void(std::vector<std::size_t>, std::vector<std::size_t>, std::vector<std::size_t>)> bk =
            [&](std::vector<std::size_t> r, std::vector<std::size_t> p, std::vector<std::size_t> x) {
                if (p.empty() && x.empty()) {
                    if (r.size() > 1) {
                        std::sort(r.begin(), r.end());
                        for (auto i : r) covered[i] = true;
                        out.push_back(r);
                    }
                    return;
                }
                std::size_t pivot = p.empty() ? x.front() : p.front();
                std::vector<std::size_t> candidates;
                for (auto v : p) {
                    if (!adj[pivot][v]) candidates.push_back(v);
                }
                for (auto v : candidates) {
                    std::vector<std::size_t> r2 = r, p2, x2;
                    r2.push_back(v);
                    for (auto w : p) if (adj[v][w]) p2.push_back(w);
                    for (auto w : x) if (adj[v][w]) x2.push_back(w);
                    bk(std::move(r2), std::move(p2), std::move(x2));
                    p.erase(std::find(p.begin(), p.end(), v));
                    x.push_back(v);
                }
            };
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        bk({}, all, {});
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!covered[i]) out.push_back({i});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());

    std::vector<std::vector<VariableId>> result;
    for (const auto& c : out) {
        std::vector<VariableId> ctx;
        for (auto i : c) ctx.push_back(vars[i]);
        result.push_back(std::move(ctx));
    }
    return result;
}

NoDisturbanceResult nodisturbance_optimum(const ScenarioSpec& scenario, std::span<const CorrelationTerm> objective,
                                          ObjectiveSense direction, const NoDisturbanceOptions& options) {
    const auto contexts = measurement_contexts(scenario, options.contexts);
    std::vector<std::size_t> offset(contexts.size() + 1, 0);
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        if (contexts[c].size() > 16) throw Error(ErrorCode::TooManyVariables, "context larger than 16 variables");
        offset[c + 1] = offset[c] + (std::size_t{1} << contexts[c].size());
    }
    const std::size_t cols = offset.back();
    auto pos_in = [](const std::vector<VariableId>& ctx, const VariableId& v) -> std::optional<std::size_t> {
        auto it = std::find(ctx.begin(), ctx.end(), v);
        if (it == ctx.end()) return std::nullopt;
        return static_cast<std::size_t>(it - ctx.begin());
    };

    LpProblem lp;
    lp.sense = direction;
    lp.objective.assign(cols, 0.0);
    for (const auto& term : objective) {
        std::optional<std::size_t> host;
        for (std::size_t c = 0; c < contexts.size() && !host; ++c) {
            if (pos_in(contexts[c], term.first) && pos_in(contexts[c], term.second)) host = c;
        }
        if (!host) {
            throw Error(ErrorCode::TermOutsideContext,
                        "<" + term.first.str() + term.second.str() + "> is not inside any measurement context");
        }
        const auto& ctx = contexts[*host];
        const std::vector<std::size_t> ps{*pos_in(ctx, term.first), *pos_in(ctx, term.second)};
        for (std::size_t o = 0; o < (std::size_t{1} << ctx.size()); ++o) {
            lp.objective[offset[*host] + o] += static_cast<double>(term.coefficient) * outcome_product(o, ctx.size(), ps);
        }
    }
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        std::vector<double> row(cols, 0.0);
        for (std::size_t j = offset[c]; j < offset[c + 1]; ++j) row[j] = 1.0;
        lp.add_row(std::move(row), RowSense::Equal, 1.0);
    }
    if (options.enforce_consistency) {
        for (std::size_t a = 0; a < contexts.size(); ++a) {
            for (std::size_t b = a + 1; b < contexts.size(); ++b) {
                std::vector<VariableId> shared;
                for (const auto& v : contexts[a]) {
                    if (pos_in(contexts[b], v)) shared.push_back(v);
                }
                if (shared.empty()) continue;
                // sum over each context of p(o) with o restricted to `shared` equal to s
                for (std::size_t s = 0; s < (std::size_t{1} << shared.size()); ++s) {
                    std::vector<double> row(cols, 0.0);
                    for (auto [ctx, sign] : {std::pair{a, 1.0}, std::pair{b, -1.0}}) {
                        const auto& cv = contexts[ctx];
                        for (std::size_t o = 0; o < (std::size_t{1} << cv.size()); ++o) {
                            bool match = true;
                            for (std::size_t k = 0; k < shared.size() && match; ++k) {
                                const std::size_t p = *pos_in(cv, shared[k]);
                                const bool bit_o = (o >> (cv.size() - 1 - p)) & 1U;
                                const bool bit_s = (s >> (shared.size() - 1 - k)) & 1U;
                                match = bit_o == bit_s;
                            }
                            if (match) row[offset[ctx] + o] += sign;
                        }
                    }
                    lp.add_row(std::move(row), RowSense::Equal, 0.0);
                }
            }
        }
    }
    const LpSolution sol = simplex_solve(lp);
    if (sol.status != LpStatus::Optimal) {
        throw Error(ErrorCode::NumericalBreakdown,
                    std::string("no-disturbance LP ended ") + std::string(lp_status_name(sol.status)));
    }
    NoDisturbanceResult result;
    result.optimum = sol.objective;
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        result.behavior.push_back(
            {contexts[c], std::vector<double>(sol.x.begin() + static_cast<std::ptrdiff_t>(offset[c]),
                                              sol.x.begin() + static_cast<std::ptrdiff_t>(offset[c + 1]))});
    }
    return result;
}

MonogamyReport monogamy_check(const ScenarioSpec& scenario, std::span<const CorrelationTerm> chsh_terms,
                              std::span<const CorrelationTerm> kcbs_terms, const std::optional<RsExpression>& rs_source) {
    std::vector<CorrelationTerm> combined(chsh_terms.begin(), chsh_terms.end());
    combined.insert(combined.end(), kcbs_terms.begin(), kcbs_terms.end());
    MultilinearPoly poly;
    for (const auto& t : combined) poly.add_term({t.first, t.second}, t.coefficient);

    MonogamyReport report;
    report.lp_minimum = nodisturbance_optimum(scenario, combined, ObjectiveSense::Minimize).optimum;
    NoDisturbanceOptions relaxed;
    relaxed.enforce_consistency = false;
    report.relaxed_minimum = nodisturbance_optimum(scenario, combined, ObjectiveSense::Minimize, relaxed).optimum;
    report.classical_minimum = classical_extrema(poly).min;

    if (rs_source) {
        const CorrelationInequality derived = derive_inequality(*rs_source);
        const MultilinearPoly lhs = derived.lhs();
        if (lhs == poly && derived.direction == Comparator::GreaterEq) {
            report.symbolic_bound = derived.bound;
            report.source_matches_terms = true;
        } else if (lhs == (-1) * poly && derived.direction == Comparator::LessEq) {
            report.symbolic_bound = -derived.bound;
            report.source_matches_terms = true;
        }
    }
    if (report.symbolic_bound) {
        const double sym = report.symbolic_bound->to_double();
        report.agreement = std::abs(report.lp_minimum - sym) <= 1e-7 &&
                           Rational(report.classical_minimum) == *report.symbolic_bound;
    } else {
        report.agreement = !rs_source && std::abs(report.lp_minimum - static_cast<double>(report.classical_minimum)) <= 1e-7;
    }
    return report;
}

JointDistribution reconstruct_pc(const JointDistribution& left, const JointDistribution& right,
                                 double proviso_tolerance) {
    std::vector<VariableId> shared;
    for (const auto& v : left.variables()) {
        if (right.position(v)) shared.push_back(v);
    }
    const JointDistribution shared_left = left.marginal(shared);
    const JointDistribution shared_right = right.marginal(shared);
    for (std::size_t s = 0; s < shared_left.outcome_count(); ++s) {
        const double gap = std::abs(shared_left.probabilities()[s] - shared_right.probabilities()[s]);
        if (gap > proviso_tolerance) {
            throw Error(ErrorCode::ProvisoViolated,
                        "tables disagree on the shared marginal by " + std::to_string(gap));
        }
    }

    std::set<VariableId> all(left.variables().begin(), left.variables().end());
    all.insert(right.variables().begin(), right.variables().end());
    std::vector<VariableId> vars(all.begin(), all.end());
    if (vars.size() > 30) throw Error(ErrorCode::TooManyVariables, "reconstruction over > 30 variables");

    std::vector<double> table(std::size_t{1} << vars.size(), 0.0);
    double total = 0.0;
    for (std::size_t o = 0; o < table.size(); ++o) {
        std::map<VariableId, int> outcome;
        for (std::size_t p = 0; p < vars.size(); ++p) outcome[vars[p]] = ((o >> (vars.size() - 1 - p)) & 1U) ? 1 : -1;
        std::map<VariableId, int> shared_outcome;
        for (const auto& v : shared) shared_outcome[v] = outcome[v];
        const double num = left.probability(outcome) * right.probability(outcome);
        const double den = shared_left.probability(shared_outcome);
        if (den <= 0.0) {
            if (num > 0.0) throw Error(ErrorCode::DivisionByZeroCell, "shared marginal is zero on a non-zero cell");
            continue;
        }
        table[o] = std::max(0.0, num / den);
        total += table[o];
    }
    for (double& p : table) p /= total;
    return JointDistribution(std::move(vars), std::move(table));
}

}  // namespace rsineq
