#pragma once

// Text formats for sum-of-squares (RS) expressions (.rsx), measurement
// scenarios (.scn) and observed correlator tables (.obs). The grammar is
// documented in docs/grammar.md.

#include "rsineq/variable.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rsineq {

enum class Comparator { GreaterEq, LessEq };

std::string_view comparator_symbol(Comparator c) noexcept;

struct LinearTerm {
    std::int64_t coefficient = 1;
    VariableId variable;

    friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

/// Signed integer combination of distinct variables; terms kept sorted by variable.
class LinearForm {
public:
    LinearForm() = default;

    /// Sorts the terms. Throws DuplicateVariableInGroup / ZeroCoefficient / InvalidArgument (empty).
    explicit LinearForm(std::vector<LinearTerm> terms);

    [[nodiscard]] const std::vector<LinearTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

    friend bool operator==(const LinearForm&, const LinearForm&) = default;

private:
    std::vector<LinearTerm> terms_;
};

/// sum_g (group_g)^2 + constant_offset  <comparator>  bound
struct RsExpression {
    std::vector<LinearForm> groups;
    std::int64_t constant_offset = 0;
    Comparator comparator = Comparator::GreaterEq;
    std::int64_t bound = 0;

    [[nodiscard]] std::vector<VariableId> variables() const;

    friend bool operator==(const RsExpression&, const RsExpression&) = default;
};

RsExpression parse_rs(std::string_view text);
std::string format_rs(const RsExpression& expr);

struct ScenarioSpec {
    std::vector<VariableId> variables;
    std::vector<std::vector<VariableId>> contexts;
    std::vector<std::pair<VariableId, VariableId>> sequential_pairs;
    std::map<VariableId, std::string> party_map;

    [[nodiscard]] bool declares(const VariableId& v) const;
    [[nodiscard]] const std::string& party_of(const VariableId& v) const;
    [[nodiscard]] bool is_sequential(const VariableId& a, const VariableId& b) const;
    [[nodiscard]] bool share_context(const VariableId& a, const VariableId& b) const;

    /// Re-checks every invariant; parse_scenario calls this before returning.
    void validate() const;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

ScenarioSpec parse_scenario(std::string_view text);
std::string format_scenario(const ScenarioSpec& spec);

struct ObservedCorrelator {
    VariableId first;
    VariableId second;
    double value = 0.0;
};

struct ObservedMean {
    VariableId variable;
    double value = 0.0;
};

struct Observations {
    std::vector<ObservedCorrelator> correlators;
    std::vector<ObservedMean> means;
};

/// One observation per line: `X1 Y1 = 0.7071` (correlator) or `X1 = 0` (mean).
Observations parse_observations(std::string_view text);

}  // namespace rsineq
