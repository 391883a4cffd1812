#pragma once

// Multilinear polynomials over +-1 variables and the sum-of-squares
// derivation of correlation inequalities.

#include "rsineq/dsl.hpp"
#include "rsineq/rational.hpp"
#include "rsineq/variable.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rsineq {

struct Monomial {
    std::vector<VariableId> variables;  // sorted, no repeats
    std::int64_t coefficient = 0;
};

/// Integer polynomial with v^2 = 1 applied; one entry per distinct variable set,
/// zero coefficients never stored.
class MultilinearPoly {
public:
    using Key = std::vector<VariableId>;

    MultilinearPoly() = default;

    static MultilinearPoly constant(std::int64_t c);
    static MultilinearPoly variable(const VariableId& v, std::int64_t coefficient = 1);
    static MultilinearPoly from_linear(const LinearForm& form);

    /// Adds `coefficient` to the monomial on `vars` (any order, repeats reduced).
    void add_term(std::vector<VariableId> vars, std::int64_t coefficient);

    [[nodiscard]] const std::map<Key, std::int64_t>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::vector<Monomial> monomials() const;
    [[nodiscard]] std::int64_t coefficient(const Key& vars) const;
    [[nodiscard]] std::int64_t constant_term() const { return coefficient({}); }
    [[nodiscard]] std::vector<VariableId> variables() const;
    [[nodiscard]] std::size_t degree() const;
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }

    /// `values` maps each variable to +1 or -1.
    [[nodiscard]] std::int64_t evaluate(const std::map<VariableId, int>& values) const;

    [[nodiscard]] std::string str() const;

    friend MultilinearPoly operator+(const MultilinearPoly& a, const MultilinearPoly& b);
    friend MultilinearPoly operator-(const MultilinearPoly& a, const MultilinearPoly& b);
    friend MultilinearPoly operator*(const MultilinearPoly& a, const MultilinearPoly& b);
    friend MultilinearPoly operator*(std::int64_t k, const MultilinearPoly& p);
    friend bool operator==(const MultilinearPoly&, const MultilinearPoly&) = default;

private:
    std::map<Key, std::int64_t> terms_;
};

/// The polynomial sum_g (group_g)^2 + constant_offset.
MultilinearPoly expand(const RsExpression& expr);

enum class TermKind { CrossParty, SameParty };

std::string_view term_kind_name(TermKind k) noexcept;

struct CorrelationTerm {
    VariableId first;   // first < second
    VariableId second;
    std::int64_t coefficient = 0;
    TermKind kind = TermKind::CrossParty;

    friend bool operator==(const CorrelationTerm&, const CorrelationTerm&) = default;
};

enum class DerivationWarning {
    EvenGroup,                 // some group has an even number of terms
    StatedBoundExceedsImplied, // the written bound is not guaranteed by the odd-sum argument
};

enum class BoundSource { Stated, Implied };

/// sum_t coefficient_t <first_t second_t>  (direction)  bound
struct CorrelationInequality {
    std::vector<CorrelationTerm> terms;
    Comparator direction = Comparator::LessEq;
    Rational bound;

    // How the inequality was obtained: expand(source) == expansion_constant + 2*orientation*lhs.
    std::optional<RsExpression> provenance;
    std::int64_t expansion_constant = 0;
    int orientation = 1;
    BoundSource bound_source = BoundSource::Stated;
    std::vector<DerivationWarning> warnings;

    [[nodiscard]] MultilinearPoly lhs() const;
    [[nodiscard]] std::vector<VariableId> variables() const;
    [[nodiscard]] std::string str() const;
    [[nodiscard]] bool has_warning(DerivationWarning w) const;
};

/// Reassembles expansion_constant + 2*orientation*lhs.
MultilinearPoly reconstruct_expansion(const CorrelationInequality& ineq);

struct GroupVerdict {
    std::size_t term_count = 0;
    bool odd = false;
    std::int64_t implied_lower_bound = 0;  // 1 for odd groups, 0 for even
};

std::vector<GroupVerdict> validate_odd_groups(const RsExpression& expr);

/// Lower bound on the l.h.s. implied by the per-square bounds plus the offset.
std::int64_t implied_lhs_bound(const RsExpression& expr);

struct DeriveOptions {
    bool strict_odd = false;  // turn EvenGroup into an error
};

CorrelationInequality derive_inequality(const RsExpression& expr, const DeriveOptions& options = {});

/// Lower-level form: `poly (cmp) bound` where poly may contain only constant and degree-2 terms.
CorrelationInequality derive_inequality(const MultilinearPoly& poly, Comparator comparator, Rational bound);

enum class InequalityKind { Spatial, Contextual, Temporal, Hybrid };
enum class TermRealization { Spatial, Contextual, Temporal };

std::string_view inequality_kind_name(InequalityKind k) noexcept;
std::string_view term_realization_name(TermRealization r) noexcept;

struct Classification {
    InequalityKind kind = InequalityKind::Spatial;
    std::vector<TermRealization> per_term;
};

/// Cross-party pairs are spatial; same-party pairs sharing a context are contextual;
/// same-party pairs that are sequential (or share no context) are temporal.
Classification classify(const CorrelationInequality& ineq, const ScenarioSpec& scenario);

/// Odd-n chained cycle source with n-2 squares; `alternating` flips the middle sign of
/// the triangle groups, giving the path-minus-closing-edge form.
RsExpression chained_cycle_source(int n, bool alternating);

}  // namespace rsineq
