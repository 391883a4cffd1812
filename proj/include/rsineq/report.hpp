#pragma once

// Structured reports shared by the CLI and the acceptance runner, the built-in
// fixtures, and the named reproduction targets.

#include "rsineq/dsl.hpp"
#include "rsineq/lhv.hpp"
#include "rsineq/optimize.hpp"
#include "rsineq/polynomial.hpp"
#include "rsineq/protocol.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsineq {

using Json = nlohmann::json;

inline constexpr std::uint64_t kDefaultSeed = 20240917;

namespace fixtures {
extern const std::string_view chsh_rsx;
extern const std::string_view kcbs_rsx;
extern const std::string_view cycle7_rsx;
extern const std::string_view chained_alternating5_rsx;
extern const std::string_view lg_rsx;
extern const std::string_view hybrid_rsx;
extern const std::string_view monogamy_rsx;

extern const std::string_view chsh_scn;
extern const std::string_view kcbs_scn;
extern const std::string_view lg_scn;
extern const std::string_view hybrid_scn;
extern const std::string_view monogamy_scn;

extern const std::string_view chsh_singlet_obs;
extern const std::string_view chsh_classical_obs;
}  // namespace fixtures

/// {"value": v, "tolerance": t}
Json measured(double value, double tolerance);
/// {"value": v, "stderr": se}
Json estimated(double value, double standard_error);
/// Exact quantities carry tolerance 0.
Json exact(const Rational& value);

Json inequality_json(const CorrelationInequality& ineq);

Json derive_report(const RsExpression& expr, const std::optional<ScenarioSpec>& scenario);

Json check_report(const ScenarioSpec& scenario, const Observations& observed, const FeasibilityResult& result);

Json optimization_json(const OptimizationResult& result, double operator_norm_at_best);

Json f_estimate_json(const FEstimate& estimate);

Json signaling_json(const SignalingReport& report);

struct Check {
    std::string name;
    bool passed = false;
    Json detail;
};

struct ReproduceOptions {
    std::uint64_t shots = 1'000'000;
    std::uint64_t seed = kDefaultSeed;
    std::size_t envelope_grid = 1000;
};

struct ReproduceResult {
    std::string target;
    std::vector<Check> checks;
    [[nodiscard]] bool passed() const;
    [[nodiscard]] Json to_json() const;
};

/// chsh-bound, kcbs-bound, ncycle-bounds, lg-bound, hybrid-singlet, hybrid-product,
/// tsirelson-envelope, s2-identity, monogamy, protocol-mc.
const std::vector<std::string>& reproduce_targets();

/// Throws InvalidArgument for an unknown target.
ReproduceResult reproduce(std::string_view target, const ReproduceOptions& options = {});

/// Helpers reused by the acceptance runner.
HybridSettings random_hybrid_settings(std::uint64_t seed, std::uint64_t stream);
std::vector<ObservedCorrelator> chsh_correlators(const DensityMatrix& rho, const Settings& settings);

}  // namespace rsineq
