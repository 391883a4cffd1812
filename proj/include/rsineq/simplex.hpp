#pragma once

// Dense two-phase simplex with Bland's rule. Sized for the small, well-conditioned
// problems the LHV engine builds; not a general-purpose LP code.

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace rsineq {

enum class RowSense { LessEq, GreaterEq, Equal };
enum class ObjectiveSense { Minimize, Maximize };

struct LpRow {
    std::vector<double> coefficients;
    RowSense sense = RowSense::LessEq;
    double rhs = 0.0;
};

struct LpProblem {
    ObjectiveSense sense = ObjectiveSense::Maximize;
    std::vector<double> objective;
    std::vector<LpRow> rows;
    // Empty means the default: lower 0, upper +inf. Use -inf / +inf for free directions.
    std::vector<double> lower;
    std::vector<double> upper;

    [[nodiscard]] std::size_t num_variables() const noexcept { return objective.size(); }
    void add_row(std::vector<double> coefficients, RowSense sense, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view lp_status_name(LpStatus s) noexcept;

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

struct SimplexOptions {
    double feasibility_tolerance = 1e-9;
    double optimality_tolerance = 1e-9;
    double pivot_tolerance = 1e-12;
    std::size_t max_iterations = 0;  // 0 = automatic
};

/// Throws DimensionMismatch for ragged input and NumericalBreakdown when a pivot
/// collapses or the returned point fails re-substitution.
LpSolution simplex_solve(const LpProblem& problem, const SimplexOptions& options = {});

/// Largest violation of any row or bound by `x` (0 when feasible).
double max_constraint_violation(const LpProblem& problem, const std::vector<double>& x);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace rsineq
