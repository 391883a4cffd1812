#include "rsineq/protocol.hpp"

#include "rsineq/error.hpp"
#include "rsineq/parallel.hpp"

#include <array>
#include <cmath>

namespace rsineq {

namespace {

const VariableId kX1('X', 1), kX2('X', 2), kY1('Y', 1), kY2('Y', 2);

constexpr std::size_t kLabels = 5;
constexpr std::uint64_t kChunk = std::uint64_t{1} << 15;

std::string_view action_label(LocalAction a, char party) {
    switch (a) {
        case LocalAction::None: return "-";
        case LocalAction::First: return party == 'X' ? "X1" : "Y1";
        case LocalAction::Second: return party == 'X' ? "X2" : "Y2";
        case LocalAction::Both: return party == 'X' ? "X1X2" : "Y1Y2";
    }
    return "?";
}

std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Embedded projectors for X1, X2, Y1, Y2, each outcome +1 (index 0) and -1 (index 1).
struct ProjectorTable {
    std::array<std::array<ComplexMatrix, 2>, 4> p;

    explicit ProjectorTable(const HybridSettings& s) {
        const std::array<std::pair<const BlochVector*, Subsystem>, 4> dirs{
            {{&s.x1, Subsystem::A}, {&s.x2, Subsystem::A}, {&s.y1, Subsystem::B}, {&s.y2, Subsystem::B}}};
        for (std::size_t i = 0; i < 4; ++i) {
            p[i][0] = embed(projector(*dirs[i].first, 1), dirs[i].second, 4);
            p[i][1] = embed(projector(*dirs[i].first, -1), dirs[i].second, 4);
        }
    }
};

const std::array<VariableId, 4>& table_variables() {
    static const std::array<VariableId, 4> vars{kX1, kX2, kY1, kY2};
    return vars;
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    Complex t = 0.0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) t += a(i, j) * b(j, i);
    }
    return t.real();
}

// Measures `vars` (indices into the projector table) jointly; appends outcomes and collapses `state`.
void measure_step(ComplexMatrix& state, const ProjectorTable& table, const std::vector<std::size_t>& vars, double u,
                  std::vector<ShotOutcome>& out) {
    const std::size_t combos = std::size_t{1} << vars.size();
    double cumulative = 0.0;
    std::size_t chosen = combos;
    std::size_t last_positive = 0;
    ComplexMatrix chosen_projector;
    for (std::size_t c = 0; c < combos; ++c) {
        ComplexMatrix pi = table.p[vars[0]][(c >> (vars.size() - 1)) & 1U];
        if (vars.size() == 2) pi = pi * table.p[vars[1]][c & 1U];
        const double p = trace_product(pi, state);
        if (p > 0.0) last_positive = c;
        cumulative += p;
        if (u < cumulative && p > 0.0) {
            chosen = c;
            chosen_projector = std::move(pi);
            break;
        }
    }
    if (chosen == combos) {  // rounding left u above the total mass
        chosen = last_positive;
        chosen_projector = table.p[vars[0]][(chosen >> (vars.size() - 1)) & 1U];
        if (vars.size() == 2) chosen_projector = chosen_projector * table.p[vars[1]][chosen & 1U];
    }
    const ComplexMatrix collapsed = chosen_projector * state * chosen_projector;
    state = Complex(1.0 / collapsed.trace().real()) * collapsed;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        const bool minus = (chosen >> (vars.size() - 1 - k)) & 1U;
        out.push_back({table_variables()[vars[k]], minus ? -1 : 1});
    }
}

ShotRecord run_shot(const ComplexMatrix& rho, const ProjectorTable& table, const MeasurementChoice& choice,
                    std::uint64_t seed, std::uint64_t stream) {
    ShotRecord shot;
    shot.choice = choice;
    shot.stream = stream;
    auto first_of = [](LocalAction a, std::size_t base) -> std::optional<std::size_t> {
        switch (a) {
            case LocalAction::None: return std::nullopt;
            case LocalAction::First:
            case LocalAction::Both: return base;
            case LocalAction::Second: return base + 1;
        }
        return std::nullopt;
    };
    std::vector<std::size_t> step1, step2;
    if (auto a = first_of(choice.alice, 0)) step1.push_back(*a);
    if (auto b = first_of(choice.bob, 2)) step1.push_back(*b);
    if (choice.alice == LocalAction::Both) step2.push_back(1);
    if (choice.bob == LocalAction::Both) step2.push_back(3);
    ComplexMatrix state = rho;
    if (!step1.empty()) measure_step(state, table, step1, counter_uniform(seed, stream, 0), shot.outcomes);
    if (!step2.empty()) measure_step(state, table, step2, counter_uniform(seed, stream, 1), shot.outcomes);
    return shot;
}

std::size_t label_index(CorrelatorLabel l) { return static_cast<std::size_t>(l); }

std::pair<VariableId, VariableId> label_variables(CorrelatorLabel l) {
    switch (l) {
        case CorrelatorLabel::X1X2: return {kX1, kX2};
        case CorrelatorLabel::X1Y1: return {kX1, kY1};
        case CorrelatorLabel::X1Y2: return {kX1, kY2};
        case CorrelatorLabel::X2Y1: return {kX2, kY1};
        case CorrelatorLabel::Y1Y2: return {kY1, kY2};
    }
    return {kX1, kX2};
}

// Integer tallies; pair[l][m] holds joint counts and sums for labels observed in the same shot.
struct Tally {
    std::array<std::int64_t, kLabels> n{}, sum{};
    std::array<std::array<std::int64_t, kLabels>, kLabels> joint_n{}, joint_sum_l{}, joint_sum_m{}, joint_prod{};

    void merge(const Tally& o) {
        for (std::size_t l = 0; l < kLabels; ++l) {
            n[l] += o.n[l];
            sum[l] += o.sum[l];
            for (std::size_t m = 0; m < kLabels; ++m) {
                joint_n[l][m] += o.joint_n[l][m];
                joint_sum_l[l][m] += o.joint_sum_l[l][m];
                joint_sum_m[l][m] += o.joint_sum_m[l][m];
                joint_prod[l][m] += o.joint_prod[l][m];
            }
        }
    }
};

void check_shot_state(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw Error(ErrorCode::DimensionMismatch, "protocol simulation needs a two-qubit state");
}

}  // namespace

std::string choice_label(const MeasurementChoice& c) {
    return std::string(action_label(c.alice, 'X')) + "," + std::string(action_label(c.bob, 'Y'));
}

std::vector<MeasurementChoice> all_choices() {
    std::vector<MeasurementChoice> out;
    for (auto a : {LocalAction::None, LocalAction::First, LocalAction::Second, LocalAction::Both}) {
        for (auto b : {LocalAction::None, LocalAction::First, LocalAction::Second, LocalAction::Both}) {
            out.push_back({a, b});
        }
    }
    return out;
}

std::string_view correlator_label_name(CorrelatorLabel l) noexcept {
    switch (l) {
        case CorrelatorLabel::X1X2: return "X1X2";
        case CorrelatorLabel::X1Y1: return "X1Y1";
        case CorrelatorLabel::X1Y2: return "X1Y2";
        case CorrelatorLabel::X2Y1: return "X2Y1";
        case CorrelatorLabel::Y1Y2: return "Y1Y2";
    }
    return "?";
}

std::vector<CorrelatorLabel> admissible_data(const MeasurementChoice& choice) {
    using A = LocalAction;
    using L = CorrelatorLabel;
    const auto a = choice.alice, b = choice.bob;
    if (a == A::None && b == A::Both) return {L::Y1Y2};
    if (a == A::Both && b == A::None) return {L::X1X2};
    if (a == A::First && b == A::Second) return {L::X1Y2};
    if (a == A::Second && b == A::First) return {L::X2Y1};
    if (a == A::First && b == A::Both) return {L::X1Y1, L::Y1Y2};
    if (a == A::Both && b == A::First) return {L::X1X2};
    if (a == A::Second && b == A::Both) return {L::X2Y1, L::Y1Y2};
    if (a == A::Both && b == A::Second) return {L::X1X2, L::X1Y2};
    if (a == A::Both && b == A::Both) return {L::X1X2, L::Y1Y2};
    return {};
}

std::vector<MeasurementChoice> data_yielding_choices() {
    std::vector<MeasurementChoice> out;
    for (const auto& c : all_choices()) {
        if (!admissible_data(c).empty()) out.push_back(c);
    }
    return out;
}

std::optional<int> ShotRecord::outcome(const VariableId& v) const {
    for (const auto& o : outcomes) {
        if (o.variable == v) return o.value;
    }
    return std::nullopt;
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
    const std::uint64_t h = mix(seed ^ mix(stream ^ mix(counter ^ 0x5851f42d4c957f2dULL)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

ShotRecord simulate_shot(const DensityMatrix& rho, const MeasurementChoice& choice, const HybridSettings& settings,
                         std::uint64_t seed, std::uint64_t stream) {
    check_shot_state(rho);
    return run_shot(rho.matrix(), ProjectorTable(settings), choice, seed, stream);
}

std::string format_shot(const ShotRecord& shot) {
    std::string line = std::to_string(shot.stream) + " " + choice_label(shot.choice);
    for (const auto& o : shot.outcomes) line += " " + o.variable.str() + (o.value > 0 ? "=+1" : "=-1");
    return line;
}

std::vector<ShotRecord> simulate_schedule(const DensityMatrix& rho, const HybridSettings& settings, std::uint64_t first,
                                          std::uint64_t count, std::uint64_t seed) {
    check_shot_state(rho);
    const ProjectorTable table(settings);
    const auto choices = data_yielding_choices();
    std::vector<ShotRecord> out;
    out.reserve(count);
    for (std::uint64_t i = first; i < first + count; ++i) {
        out.push_back(run_shot(rho.matrix(), table, choices[i % choices.size()], seed, i));
    }
    return out;
}

FEstimate estimate_f(const DensityMatrix& rho, const HybridSettings& settings, std::uint64_t shots, std::uint64_t seed) {
    check_shot_state(rho);
    if (shots == 0) throw Error(ErrorCode::InvalidArgument, "shots must be at least 1");
    const ProjectorTable table(settings);
    const auto choices = data_yielding_choices();
    std::vector<std::vector<CorrelatorLabel>> data;
    for (const auto& c : choices) data.push_back(admissible_data(c));

    const std::size_t chunks = static_cast<std::size_t>((shots + kChunk - 1) / kChunk);
    std::vector<Tally> tallies(chunks);
    parallel_for(chunks, [&](std::size_t chunk) {
        Tally t;
        const std::uint64_t lo = chunk * kChunk, hi = std::min(shots, lo + kChunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            const std::size_t k = static_cast<std::size_t>(i % choices.size());
            const ShotRecord shot = run_shot(rho.matrix(), table, choices[k], seed, i);
            std::array<int, kLabels> value{};
            for (auto l : data[k]) {
                const auto [a, b] = label_variables(l);
                value[label_index(l)] = *shot.outcome(a) * *shot.outcome(b);
                t.n[label_index(l)] += 1;
                t.sum[label_index(l)] += value[label_index(l)];
            }
            for (auto l : data[k]) {
                for (auto m : data[k]) {
                    const std::size_t li = label_index(l), mi = label_index(m);
                    if (li >= mi) continue;
                    t.joint_n[li][mi] += 1;
                    t.joint_sum_l[li][mi] += value[li];
                    t.joint_sum_m[li][mi] += value[mi];
                    t.joint_prod[li][mi] += value[li] * value[mi];
                }
            }
        }
        tallies[chunk] = t;
    });
    Tally total;
    for (const auto& t : tallies) total.merge(t);

    FEstimate out;
    out.shots = shots;
    std::array<double, kLabels> mean{}, var_of_mean{};
    for (std::size_t l = 0; l < kLabels; ++l) {
        const double n = static_cast<double>(total.n[l]);
        if (total.n[l] == 0) continue;
        mean[l] = static_cast<double>(total.sum[l]) / n;
        const double sample_var =
            total.n[l] > 1 ? (n - static_cast<double>(total.sum[l]) * static_cast<double>(total.sum[l]) / n) / (n - 1.0) : 0.0;
        var_of_mean[l] = sample_var / n;
        out.terms.push_back({static_cast<CorrelatorLabel>(l), mean[l], std::sqrt(var_of_mean[l]),
                             static_cast<std::uint64_t>(total.n[l])});
    }
    const std::array<double, kLabels> coeff{1.0, 0.0, 1.0, -1.0, 1.0};
    double variance = 0.0;
    for (std::size_t l = 0; l < kLabels; ++l) {
        if (coeff[l] != 0.0 && total.n[l] == 0) {
            throw Error(ErrorCode::InvalidArgument, "too few shots to gather every term of F");
        }
        out.f += coeff[l] * mean[l];
        variance += coeff[l] * coeff[l] * var_of_mean[l];
        for (std::size_t m = l + 1; m < kLabels; ++m) {
            const std::int64_t nj = total.joint_n[l][m];
            if (nj < 2 || coeff[l] == 0.0 || coeff[m] == 0.0) continue;
            const double njd = static_cast<double>(nj);
            const double cov = (static_cast<double>(total.joint_prod[l][m]) -
                                static_cast<double>(total.joint_sum_l[l][m]) *
                                    static_cast<double>(total.joint_sum_m[l][m]) / njd) /
                               (njd - 1.0);
            variance += 2.0 * coeff[l] * coeff[m] * njd * cov /
                        (static_cast<double>(total.n[l]) * static_cast<double>(total.n[m]));
        }
    }
    out.standard_error = std::sqrt(std::max(0.0, variance));
    return out;
}

SignalingReport signaling_test(const DensityMatrix& rho, const HybridSettings& settings, std::uint64_t shots,
                               std::uint64_t seed) {
    check_shot_state(rho);
    if (shots == 0) throw Error(ErrorCode::InvalidArgument, "shots must be at least 1");
    const ProjectorTable table(settings);
    const MeasurementChoice alone{LocalAction::None, LocalAction::Second};
    const MeasurementChoice after{LocalAction::None, LocalAction::Both};

    auto count_plus = [&](const MeasurementChoice& choice, std::uint64_t offset) {
        const std::size_t chunks = static_cast<std::size_t>((shots + kChunk - 1) / kChunk);
        std::vector<std::uint64_t> plus(chunks, 0);
        parallel_for(chunks, [&](std::size_t chunk) {
            const std::uint64_t lo = chunk * kChunk, hi = std::min(shots, lo + kChunk);
            for (std::uint64_t i = lo; i < hi; ++i) {
                if (*run_shot(rho.matrix(), table, choice, seed, offset + i).outcome(kY2) > 0) ++plus[chunk];
            }
        });
        std::uint64_t total = 0;
        for (auto p : plus) total += p;
        return static_cast<double>(total) / static_cast<double>(shots);
    };

    SignalingReport r;
    r.shots_per_arm = shots;
    r.p_alone = count_plus(alone, 0);
    r.p_after = count_plus(after, shots);
    const double n = static_cast<double>(shots);
    r.se_alone = std::sqrt(r.p_alone * (1.0 - r.p_alone) / n);
    r.se_after = std::sqrt(r.p_after * (1.0 - r.p_after) / n);
    r.difference = r.p_alone - r.p_after;
    r.se_difference = std::hypot(r.se_alone, r.se_after);
    r.z_score = r.se_difference > 0.0 ? r.difference / r.se_difference : 0.0;

    const ComplexMatrix& y2_plus = table.p[3][0];
    r.analytic_alone = trace_product(y2_plus, rho.matrix());
    for (std::size_t a = 0; a < 2; ++a) {
        const ComplexMatrix& py1 = table.p[2][a];
        r.analytic_after += trace_product(y2_plus, py1 * rho.matrix() * py1);
    }
    return r;
}

}  // namespace rsineq
