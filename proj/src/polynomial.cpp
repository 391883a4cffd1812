#include "rsineq/polynomial.hpp"

#include "rsineq/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace rsineq {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::InvalidArgument, "coefficient overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::InvalidArgument, "coefficient overflow");
    return r;
}

// v^2 = 1: sort, then drop variables that occur an even number of times.
std::vector<VariableId> reduce(std::vector<VariableId> vars) {
    std::sort(vars.begin(), vars.end());
    std::vector<VariableId> out;
    for (std::size_t i = 0; i < vars.size();) {
        std::size_t j = i;
        while (j < vars.size() && vars[j] == vars[i]) ++j;
        if ((j - i) % 2 == 1) out.push_back(vars[i]);
        i = j;
    }
    return out;
}

std::string product_label(const std::vector<VariableId>& vars) {
    std::string s;
    for (const auto& v : vars) s += v.str();
    return s;
}

}  // namespace

MultilinearPoly MultilinearPoly::constant(std::int64_t c) {
    MultilinearPoly p;
    p.add_term({}, c);
    return p;
}

MultilinearPoly MultilinearPoly::variable(const VariableId& v, std::int64_t coefficient) {
    MultilinearPoly p;
    p.add_term({v}, coefficient);
    return p;
}

MultilinearPoly MultilinearPoly::from_linear(const LinearForm& form) {
    MultilinearPoly p;
    for (const auto& t : form.terms()) p.add_term({t.variable}, t.coefficient);
    return p;
}

void MultilinearPoly::add_term(std::vector<VariableId> vars, std::int64_t coefficient) {
    if (coefficient == 0) return;
    Key key = reduce(std::move(vars));
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), coefficient);
        return;
    }
    it->second = checked_add(it->second, coefficient);
    if (it->second == 0) terms_.erase(it);
}

std::vector<Monomial> MultilinearPoly::monomials() const {
    std::vector<Monomial> out;
    out.reserve(terms_.size());
    for (const auto& [vars, c] : terms_) out.push_back({vars, c});
    return out;
}

std::int64_t MultilinearPoly::coefficient(const Key& vars) const {
    auto it = terms_.find(reduce(vars));
    return it == terms_.end() ? 0 : it->second;
}

std::vector<VariableId> MultilinearPoly::variables() const {
    std::set<VariableId> seen;
    for (const auto& [vars, c] : terms_) seen.insert(vars.begin(), vars.end());
    return {seen.begin(), seen.end()};
}

std::size_t MultilinearPoly::degree() const {
    std::size_t d = 0;
    for (const auto& [vars, c] : terms_) d = std::max(d, vars.size());
    return d;
}

std::int64_t MultilinearPoly::evaluate(const std::map<VariableId, int>& values) const {
    std::int64_t total = 0;
    for (const auto& [vars, c] : terms_) {
        int sign = 1;
        for (const auto& v : vars) {
            auto it = values.find(v);
            if (it == values.end()) throw Error(ErrorCode::UnknownVariable, v.str() + " has no value");
            if (it->second != 1 && it->second != -1) {
                throw Error(ErrorCode::InvalidArgument, v.str() + " must be +1 or -1");
            }
            sign *= it->second;
        }
        total = checked_add(total, sign * c);
    }
    return total;
}

std::string MultilinearPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [vars, c] : terms_) {
        const std::int64_t mag = c < 0 ? -c : c;
        if (first) {
            if (c < 0) out << '-';
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        if (vars.empty()) {
            out << mag;
        } else {
            if (mag != 1) out << mag << '*';
            out << product_label(vars);
        }
        first = false;
    }
    return out.str();
}

MultilinearPoly operator+(const MultilinearPoly& a, const MultilinearPoly& b) {
    MultilinearPoly r = a;
    for (const auto& [vars, c] : b.terms_) r.add_term(vars, c);
    return r;
}

MultilinearPoly operator-(const MultilinearPoly& a, const MultilinearPoly& b) {
    return a + (-1) * b;
}

MultilinearPoly operator*(const MultilinearPoly& a, const MultilinearPoly& b) {
    MultilinearPoly r;
    for (const auto& [va, ca] : a.terms_) {
        for (const auto& [vb, cb] : b.terms_) {
            std::vector<VariableId> vars = va;
            vars.insert(vars.end(), vb.begin(), vb.end());
            r.add_term(std::move(vars), checked_mul(ca, cb));
        }
    }
    return r;
}

MultilinearPoly operator*(std::int64_t k, const MultilinearPoly& p) {
    MultilinearPoly r;
    for (const auto& [vars, c] : p.terms_) r.add_term(vars, checked_mul(k, c));
    return r;
}

MultilinearPoly expand(const RsExpression& expr) {
    MultilinearPoly total = MultilinearPoly::constant(expr.constant_offset);
    for (const auto& group : expr.groups) {
        const auto lin = MultilinearPoly::from_linear(group);
        total = total + lin * lin;
    }
    return total;
}

// ---------------------------------------------------------------------------

std::string_view term_kind_name(TermKind k) noexcept {
    return k == TermKind::CrossParty ? "cross-party" : "same-party";
}

MultilinearPoly CorrelationInequality::lhs() const {
    MultilinearPoly p;
    for (const auto& t : terms) p.add_term({t.first, t.second}, t.coefficient);
    return p;
}

std::vector<VariableId> CorrelationInequality::variables() const {
    std::set<VariableId> seen;
    for (const auto& t : terms) {
        seen.insert(t.first);
        seen.insert(t.second);
    }
    return {seen.begin(), seen.end()};
}

std::string CorrelationInequality::str() const {
    std::ostringstream out;
    if (terms.empty()) out << '0';
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        const std::int64_t mag = t.coefficient < 0 ? -t.coefficient : t.coefficient;
        if (i == 0) {
            if (t.coefficient < 0) out << '-';
        } else {
            out << (t.coefficient < 0 ? " - " : " + ");
        }
        if (mag != 1) out << mag << '*';
        out << '<' << t.first.str() << t.second.str() << '>';
    }
    out << ' ' << comparator_symbol(direction) << ' ' << bound.str();
    return out.str();
}

bool CorrelationInequality::has_warning(DerivationWarning w) const {
    return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

MultilinearPoly reconstruct_expansion(const CorrelationInequality& ineq) {
    return MultilinearPoly::constant(ineq.expansion_constant) + (2 * ineq.orientation) * ineq.lhs();
}

std::vector<GroupVerdict> validate_odd_groups(const RsExpression& expr) {
    std::vector<GroupVerdict> out;
    for (const auto& g : expr.groups) {
        const bool odd = g.size() % 2 == 1;
        out.push_back({g.size(), odd, odd ? 1 : 0});
    }
    return out;
}

std::int64_t implied_lhs_bound(const RsExpression& expr) {
    std::int64_t total = expr.constant_offset;
    for (const auto& v : validate_odd_groups(expr)) total = checked_add(total, v.implied_lower_bound);
    return total;
}

CorrelationInequality derive_inequality(const MultilinearPoly& poly, Comparator comparator, Rational bound) {
    CorrelationInequality ineq;
    MultilinearPoly quadratic;
    for (const auto& [vars, c] : poly.terms()) {
        if (vars.empty()) continue;
        if (vars.size() != 2) {
            throw Error(ErrorCode::ResidualDegree,
                        "expansion leaves a degree-" + std::to_string(vars.size()) + " term " + product_label(vars));
        }
        quadratic.add_term(vars, c);
    }
    const std::int64_t constant = poly.constant_term();
    ineq.expansion_constant = constant;

    // poly = C + Q  (cmp) b   =>   Q/2 (cmp) (b - C)/2, then flip so the leading term is positive.
    const int orientation = (!quadratic.is_zero() && quadratic.terms().begin()->second < 0) ? -1 : 1;
    ineq.orientation = orientation;
    const Rational rhs = (bound - Rational(constant)) / Rational(2 * orientation);
    ineq.bound = rhs;
    ineq.direction = orientation > 0 ? comparator
                                     : (comparator == Comparator::GreaterEq ? Comparator::LessEq : Comparator::GreaterEq);
    for (const auto& [vars, c] : quadratic.terms()) {
        if (c % 2 != 0) {
            // Only reachable through the low-level overload; squares always give even cross terms.
            throw Error(ErrorCode::InvalidArgument, "odd cross coefficient on " + product_label(vars));
        }
        CorrelationTerm t;
        t.first = vars[0];
        t.second = vars[1];
        t.coefficient = c / 2 * orientation;
        t.kind = vars[0].party == vars[1].party ? TermKind::SameParty : TermKind::CrossParty;
        ineq.terms.push_back(t);
    }
    return ineq;
}

CorrelationInequality derive_inequality(const RsExpression& expr, const DeriveOptions& options) {
    std::vector<DerivationWarning> warnings;
    const auto verdicts = validate_odd_groups(expr);
    const bool any_even = std::any_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return !v.odd; });
    if (any_even) {
        if (options.strict_odd) throw Error(ErrorCode::EvenGroup, "a group has an even number of terms");
        warnings.push_back(DerivationWarning::EvenGroup);
    }

    // For ">=" the odd-sum argument guarantees lhs >= implied; use it when it is the stronger claim.
    std::int64_t effective = expr.bound;
    BoundSource source = BoundSource::Stated;
    if (expr.comparator == Comparator::GreaterEq) {
        const std::int64_t implied = implied_lhs_bound(expr);
        if (implied > expr.bound) {
            effective = implied;
            source = BoundSource::Implied;
        } else if (implied < expr.bound) {
            warnings.push_back(DerivationWarning::StatedBoundExceedsImplied);
        }
    }

    CorrelationInequality ineq = derive_inequality(expand(expr), expr.comparator, Rational(effective));
    ineq.provenance = expr;
    ineq.bound_source = source;
    ineq.warnings = std::move(warnings);
    return ineq;
}

// ---------------------------------------------------------------------------

std::string_view inequality_kind_name(InequalityKind k) noexcept {
    switch (k) {
        case InequalityKind::Spatial: return "spatial";
        case InequalityKind::Contextual: return "contextual";
        case InequalityKind::Temporal: return "temporal";
        case InequalityKind::Hybrid: return "hybrid";
    }
    return "unknown";
}

std::string_view term_realization_name(TermRealization r) noexcept {
    switch (r) {
        case TermRealization::Spatial: return "spatial";
        case TermRealization::Contextual: return "contextual";
        case TermRealization::Temporal: return "temporal";
    }
    return "unknown";
}

Classification classify(const CorrelationInequality& ineq, const ScenarioSpec& scenario) {
    for (const auto& v : ineq.variables()) {
        if (!scenario.declares(v)) throw Error(ErrorCode::UnmappedVariable, v.str() + " is not in the scenario");
    }
    Classification out;
    bool any_temporal = false, any_spatial = false, any_contextual = false;
    for (const auto& t : ineq.terms) {
        TermRealization r;
        if (scenario.party_of(t.first) != scenario.party_of(t.second)) {
            r = TermRealization::Spatial;
        } else if (!scenario.is_sequential(t.first, t.second) && scenario.share_context(t.first, t.second)) {
            r = TermRealization::Contextual;
        } else {
            r = TermRealization::Temporal;
        }
        any_temporal |= r == TermRealization::Temporal;
        any_spatial |= r == TermRealization::Spatial;
        any_contextual |= r == TermRealization::Contextual;
        out.per_term.push_back(r);
    }
    if (any_temporal) {
        out.kind = (any_spatial || any_contextual) ? InequalityKind::Hybrid : InequalityKind::Temporal;
    } else {
        out.kind = any_contextual ? InequalityKind::Contextual : InequalityKind::Spatial;
    }
    return out;
}

RsExpression chained_cycle_source(int n, bool alternating) {
    if (n < 5 || n % 2 == 0) throw Error(ErrorCode::InvalidArgument, "chained cycle needs odd n >= 5");
    auto x = [](int i) { return VariableId('X', static_cast<std::uint32_t>(i)); };
    const int k = (n - 1) / 2;
    RsExpression expr;
    for (int i = 1; i <= k; ++i) {
        expr.groups.emplace_back(std::vector<LinearTerm>{
            {1, x(2 * i - 1)}, {alternating ? -1 : 1, x(2 * i)}, {1, x(2 * i + 1)}});
    }
    // Correction squares cancel the chords X_{2i-1}X_{2i+1} and close the cycle with X_1X_n.
    for (int i = 1; i <= k - 1; ++i) {
        expr.groups.emplace_back(std::vector<LinearTerm>{{1, x(1)}, {-1, x(2 * i + 1)}, {1, x(2 * i + 3)}});
    }
    expr.comparator = Comparator::GreaterEq;
    expr.bound = static_cast<std::int64_t>(expr.groups.size());
    return expr;
}

}  // namespace rsineq
