#pragma once

// Local/deterministic hidden-variable machinery: exact classical extrema,
// joint-distribution existence by LP, the no-disturbance polytope and the
// CHSH/KCBS monogamy check.

#include "rsineq/dsl.hpp"
#include "rsineq/polynomial.hpp"
#include "rsineq/simplex.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace rsineq {

inline constexpr std::size_t kExtremaVariableCap = 24;
inline constexpr std::size_t kFeasibilityVariableCap = 20;

struct DeterministicAssignment {
    std::map<VariableId, int> values;  // each +1 or -1

    [[nodiscard]] int at(const VariableId& v) const;
    friend bool operator==(const DeterministicAssignment&, const DeterministicAssignment&) = default;
};

struct WeightedAssignment {
    DeterministicAssignment assignment;
    double weight = 0.0;
};

/// Probability distribution over complete +-1 assignments.
struct DhvModel {
    std::vector<VariableId> variables;
    std::vector<WeightedAssignment> support;

    /// Weights >= 0 summing to 1 within 1e-12; assignments total over `variables`.
    void validate() const;
    [[nodiscard]] double correlator(const VariableId& a, const VariableId& b) const;
    [[nodiscard]] double mean(const VariableId& a) const;
};

/// Full outcome table. Outcome index bit (n-1-p) holds variable p, 1 meaning +1,
/// so increasing index is lexicographic order with -1 < +1.
class JointDistribution {
public:
    JointDistribution(std::vector<VariableId> variables, std::vector<double> probabilities,
                      double tolerance = 1e-12);

    [[nodiscard]] const std::vector<VariableId>& variables() const noexcept { return variables_; }
    [[nodiscard]] const std::vector<double>& probabilities() const noexcept { return probabilities_; }
    [[nodiscard]] std::size_t outcome_count() const noexcept { return probabilities_.size(); }
    [[nodiscard]] std::optional<std::size_t> position(const VariableId& v) const;
    [[nodiscard]] int value(std::size_t outcome, std::size_t position) const;
    [[nodiscard]] std::size_t index_of(const std::map<VariableId, int>& outcome) const;
    [[nodiscard]] double probability(const std::map<VariableId, int>& outcome) const;
    [[nodiscard]] JointDistribution marginal(const std::vector<VariableId>& keep) const;

private:
    std::vector<VariableId> variables_;
    std::vector<double> probabilities_;
};

struct ClassicalExtrema {
    std::vector<VariableId> variables;
    std::int64_t min = 0;
    std::int64_t max = 0;
    DeterministicAssignment argmin;  // lexicographically smallest witness
    DeterministicAssignment argmax;
};

ClassicalExtrema classical_extrema(const MultilinearPoly& poly);
ClassicalExtrema classical_extrema(const CorrelationInequality& ineq);

/// True when every deterministic assignment satisfies the inequality.
bool holds_classically(const CorrelationInequality& ineq);

JointDistribution dhv_to_jd(const DhvModel& model);
double correlator_from_jd(const JointDistribution& jd, const VariableId& a, const VariableId& b);
double mean_from_jd(const JointDistribution& jd, const VariableId& a);

struct CertificateTerm {
    std::vector<VariableId> variables;  // one (mean) or two (correlator)
    double coefficient = 0.0;
};

/// sum_k coefficient_k <term_k> <= classical_bound for every DHV model, while the
/// observed data give observed_value > classical_bound.
struct FeasibilityCertificate {
    std::vector<CertificateTerm> terms;
    double classical_bound = 0.0;
    double observed_value = 0.0;
};

struct FeasibilityResult {
    bool feasible = false;
    std::optional<DhvModel> witness_model;
    std::optional<JointDistribution> witness;
    std::optional<FeasibilityCertificate> certificate;
    double max_residual = 0.0;  // witness reproduction error
};

struct FeasibilityOptions {
    double tolerance = 1e-9;
};

FeasibilityResult jd_feasibility(const ScenarioSpec& scenario, const Observations& observed,
                                 const FeasibilityOptions& options = {});

enum class ContextMode {
    MaximalCliques,  // jointly measurable sets = maximal cliques of the declared compatibility graph
    Declared,        // use the declared contexts verbatim
};

struct NoDisturbanceOptions {
    ContextMode contexts = ContextMode::MaximalCliques;
    bool enforce_consistency = true;  // false drops the marginal-agreement rows
};

struct ContextTable {
    std::vector<VariableId> variables;
    std::vector<double> probabilities;  // same indexing as JointDistribution
};

struct NoDisturbanceResult {
    double optimum = 0.0;
    std::vector<ContextTable> behavior;
};

std::vector<std::vector<VariableId>> measurement_contexts(const ScenarioSpec& scenario, ContextMode mode);

NoDisturbanceResult nodisturbance_optimum(const ScenarioSpec& scenario, std::span<const CorrelationTerm> objective,
                                          ObjectiveSense direction, const NoDisturbanceOptions& options = {});

struct MonogamyReport {
    double lp_minimum = 0.0;
    double relaxed_minimum = 0.0;          // without marginal-consistency rows
    std::int64_t classical_minimum = 0;
    std::optional<Rational> symbolic_bound;  // from the RS source, when given
    bool source_matches_terms = false;
    bool agreement = false;                  // lp == symbolic == classical
};

MonogamyReport monogamy_check(const ScenarioSpec& scenario, std::span<const CorrelationTerm> chsh_terms,
                              std::span<const CorrelationTerm> kcbs_terms,
                              const std::optional<RsExpression>& rs_source = std::nullopt);

/// p_C = p_left * p_right / p_shared on the union of variables, where p_shared is the
/// left table's marginal on the shared variables. Both tables must agree on that
/// marginal within `proviso_tolerance`.
JointDistribution reconstruct_pc(const JointDistribution& left, const JointDistribution& right,
                                 double proviso_tolerance = 1e-9);

}  // namespace rsineq
