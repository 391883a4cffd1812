#pragma once

// Shot-level Monte Carlo of the hybrid protocol: each party performs nothing,
// one of its two measurements, or both in time order, on a shared two-qubit state.

#include "rsineq/quantum.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rsineq {

/// None, only the first observable, only the second, or first then second.
enum class LocalAction { None, First, Second, Both };

struct MeasurementChoice {
    LocalAction alice = LocalAction::None;
    LocalAction bob = LocalAction::None;

    friend bool operator==(const MeasurementChoice&, const MeasurementChoice&) = default;
};

std::string choice_label(const MeasurementChoice& c);

/// The 16 choices, alice-major in the order None, First, Second, Both.
std::vector<MeasurementChoice> all_choices();

enum class CorrelatorLabel { X1X2, X1Y1, X1Y2, X2Y1, Y1Y2 };

std::string_view correlator_label_name(CorrelatorLabel l) noexcept;

/// Correlators a single run of `choice` supplies under the no-invasiveness bookkeeping.
std::vector<CorrelatorLabel> admissible_data(const MeasurementChoice& choice);

/// Choices with non-empty admissible data, in all_choices() order.
std::vector<MeasurementChoice> data_yielding_choices();

struct ShotOutcome {
    VariableId variable;
    int value = 0;
};

struct ShotRecord {
    MeasurementChoice choice;
    std::vector<ShotOutcome> outcomes;  // time order; simultaneous outcomes alice first
    std::uint64_t stream = 0;

    [[nodiscard]] std::optional<int> outcome(const VariableId& v) const;
};

/// Uniform double in [0, 1) from a counter-based hash of (seed, stream, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept;

/// Born sampling with Lueders collapse; step 1 measures each party's first action jointly,
/// step 2 the second observable of any party choosing Both. Deterministic in (seed, stream).
ShotRecord simulate_shot(const DensityMatrix& rho, const MeasurementChoice& choice, const HybridSettings& settings,
                         std::uint64_t seed, std::uint64_t stream);

/// `<stream> <alice>,<bob> <var>=<+1|-1> ...`
std::string format_shot(const ShotRecord& shot);

struct CorrelatorEstimate {
    CorrelatorLabel label = CorrelatorLabel::X1X2;
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t shots = 0;
};

struct FEstimate {
    std::vector<CorrelatorEstimate> terms;  // every label gathered, in enum order
    double f = 0.0;                         // <X1X2> + <X1Y2> - <X2Y1> + <Y1Y2>
    double standard_error = 0.0;            // includes covariances of same-shot data
    std::uint64_t shots = 0;
};

/// Shot i runs data_yielding_choices()[i % 9] on stream i. Bit-identical for any thread count.
FEstimate estimate_f(const DensityMatrix& rho, const HybridSettings& settings, std::uint64_t shots, std::uint64_t seed);

/// Streams [first, first + count) of the estimate_f schedule, for logging.
std::vector<ShotRecord> simulate_schedule(const DensityMatrix& rho, const HybridSettings& settings, std::uint64_t first,
                                          std::uint64_t count, std::uint64_t seed);

struct SignalingReport {
    double p_alone = 0.0;          // P(Y2 = +1) under (-, Y2)
    double p_after = 0.0;          // P(Y2 = +1) under (-, Y1Y2)
    double se_alone = 0.0;
    double se_after = 0.0;
    double difference = 0.0;       // p_alone - p_after
    double se_difference = 0.0;
    double z_score = 0.0;
    double analytic_alone = 0.0;
    double analytic_after = 0.0;
    std::uint64_t shots_per_arm = 0;
};

/// `shots` runs of each arm; the after-arm uses streams offset by `shots`.
SignalingReport signaling_test(const DensityMatrix& rho, const HybridSettings& settings, std::uint64_t shots,
                               std::uint64_t seed);

}  // namespace rsineq
