#pragma once

// Derivative-free maximization of quantum inequality values over measurement
// angles and state families, plus the hybrid Tsirelson envelope scan.

#include "rsineq/quantum.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace rsineq {

enum class SettingsMode {
    Coplanar,    // one angle per direction, x-z plane
    FullSphere,  // polar and azimuth per direction
};

enum class StateFamily {
    Fixed,        // the given state
    AlignedWith,  // product state with nA = nB = the setting of `aligned_variable`
    ProductShared,       // product state with nA = nB free
    ProductIndependent,  // product state with nA, nB free
};

struct SettingsParametrization {
    std::vector<VariableId> variables;  // one direction each
    SettingsMode mode = SettingsMode::Coplanar;
    StateFamily family = StateFamily::Fixed;
    std::optional<DensityMatrix> fixed_state;
    std::optional<VariableId> aligned_variable;

    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] Settings settings(const std::vector<double>& params) const;
    [[nodiscard]] DensityMatrix state(const std::vector<double>& params) const;
};

struct OptimizeOptions {
    std::size_t grid = 24;                 // points per angle, reduced to fit the budget
    std::size_t budget = 2'000'000;        // total objective evaluations
    std::size_t starts = 4;                // best grid points refined
    double min_step = 1e-8;
    std::optional<std::uint64_t> seed;     // random grid offset when set
};

enum class OptimizeStatus { Converged, BudgetExhausted };

struct OptimizationResult {
    double value = 0.0;                    // inequality l.h.s. at the best point
    std::vector<double> parameters;
    Settings settings;
    std::size_t evaluations = 0;
    std::size_t grid_points_per_angle = 0;
    OptimizeStatus status = OptimizeStatus::Converged;
    [[nodiscard]] bool converged() const noexcept { return status == OptimizeStatus::Converged; }
};

/// Pushes the l.h.s. towards violation: maximized for <=, minimized for >=.
OptimizationResult maximize_violation(const CorrelationInequality& ineq, const TermAssignment& assignment,
                                      const SettingsParametrization& parametrization,
                                      const OptimizeOptions& options = {});

/// Hybrid settings x2 = z, x1 at angle t1 from x2, y2 = z, y1 at angle t2 from y2, all in the x-z plane.
HybridSettings coplanar_settings_for_angles(double theta1, double theta2);

struct EnvelopePoint {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double value = 0.0;
};

struct EnvelopeScan {
    std::size_t resolution = 0;
    std::vector<double> values;  // theta1-major, theta_i = -pi + 2 pi i / resolution
    double max = 0.0;
    std::vector<EnvelopePoint> argmax;  // every grid point within 1e-12 of max

    [[nodiscard]] double theta(std::size_t i) const;
    void write_csv(std::ostream& out) const;
};

EnvelopeScan scan_envelope(std::size_t resolution);

}  // namespace rsineq
