#include "rsineq/error.hpp"
#include "rsineq/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace rsineq;

namespace {

enum class Format { Human, Json, Csv };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void render_human(const Json& j, std::ostream& out, const std::string& indent = "") {
    if (j.is_object()) {
        // {"value": v, "tolerance"|"stderr": e} prints inline.
        if (j.contains("value") && (j.contains("tolerance") || j.contains("stderr")) && j.size() <= 3 &&
            !j.contains("term")) {
            out << j["value"].dump();
            if (j.contains("exact")) out << " (exact " << j["exact"].get<std::string>() << ")";
            else if (j.contains("stderr")) out << " +- " << j["stderr"].dump() << " (stderr)";
            else out << " +- " << j["tolerance"].dump();
            out << '\n';
            return;
        }
        out << '\n';
        for (const auto& [k, v] : j.items()) {
            out << indent << k << ": ";
            render_human(v, out, indent + "  ");
        }
        return;
    }
    if (j.is_array()) {
        if (std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); })) {
            out << j.dump() << '\n';
            return;
        }
        out << '\n';
        for (const auto& e : j) {
            out << indent << "- ";
            render_human(e, out, indent + "  ");
        }
        return;
    }
    out << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
}

void emit(const Json& j, Format format) {
    if (format == Format::Human) {
        std::ostringstream ss;
        render_human(j, ss);
        std::string s = ss.str();
        if (!s.empty() && s.front() == '\n') s.erase(0, 1);
        std::cout << s;
    } else {
        std::cout << j.dump(2) << '\n';
    }
}

DensityMatrix state_by_name(const std::string& name, const HybridSettings& ladder) {
    if (name == "singlet") return DensityMatrix::singlet();
    if (name == "product") return DensityMatrix::product(ladder.y2, ladder.y2);
    if (name == "mixed") return DensityMatrix::maximally_mixed(4);
    throw Error(ErrorCode::InvalidArgument, "unknown state '" + name + "' (singlet, product, mixed)");
}

HybridSettings ladder_by_name(const std::string& name) {
    if (name == "aligned") return quarter_turn_ladder(LadderOrientation::Aligned);
    if (name == "antipodal") return quarter_turn_ladder(LadderOrientation::Antipodal);
    throw Error(ErrorCode::InvalidArgument, "unknown ladder '" + name + "' (aligned, antipodal)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sum-of-squares correlation inequality workbench"};
    app.require_subcommand(1);
    app.fallthrough();

    Format format = Format::Human;
    const std::map<std::string, Format> format_names{{"human", Format::Human}, {"json", Format::Json}, {"csv", Format::Csv}};
    app.add_option("--format", format, "Output format: human, json, csv")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

    std::string input, scenario_path, observations_path;
    std::uint64_t shots = 1'000'000;
    std::uint64_t seed = kDefaultSeed;
    std::size_t grid = 0;
    double tolerance = 1e-9;
    std::string state_name = "singlet", ladder_name = "antipodal", mode_name = "coplanar", family_name = "fixed";
    std::string log_path;
    std::uint64_t log_count = 0;
    std::string target;

    auto* derive = app.add_subcommand("derive", "Derive a correlation inequality from an RS expression");
    derive->add_option("--input", input, "RS expression file (.rsx)")->required();
    derive->add_option("--scenario", scenario_path, "Scenario file (.scn) for classification");

    auto* check = app.add_subcommand("check", "Joint-distribution feasibility of observed correlators (exit 0/1/2)");
    check->add_option("--scenario", scenario_path, "Scenario file (.scn)")->required();
    check->add_option("--observations", observations_path, "Observations file (.obs)")->required();
    check->add_option("--tolerance", tolerance, "LP feasibility tolerance");

    auto* optimize = app.add_subcommand("optimize", "Maximize the quantum violation over settings");
    optimize->add_option("--input", input, "RS expression file (.rsx)")->required();
    optimize->add_option("--scenario", scenario_path, "Scenario file (.scn) fixing parties and sequential pairs")
        ->required();
    optimize->add_option("--state", state_name, "singlet, mixed, or a product family via --family");
    optimize->add_option("--family", family_name, "fixed, aligned-y2, product-shared, product-free");
    optimize->add_option("--mode", mode_name, "coplanar or sphere");
    optimize->add_option("--grid", grid, "Grid points per angle (default 24)");
    optimize->add_option("--seed", seed, "Random grid offset seed");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the hybrid F");
    simulate->add_option("--shots", shots, "Number of shots");
    simulate->add_option("--seed", seed, "Master seed");
    simulate->add_option("--state", state_name, "singlet, product, mixed");
    simulate->add_option("--ladder", ladder_name, "aligned or antipodal pi/4 ladder");
    simulate->add_option("--log", log_path, "Write a shot log to this file");
    simulate->add_option("--log-count", log_count, "Shots to log (default: all)");

    auto* signaling = app.add_subcommand("signaling", "P(Y2=+) with and without a preceding Y1");
    signaling->add_option("--shots", shots, "Shots per arm");
    signaling->add_option("--seed", seed, "Master seed");
    signaling->add_option("--state", state_name, "singlet, product, mixed");
    signaling->add_option("--ladder", ladder_name, "aligned or antipodal pi/4 ladder");

    auto* scan = app.add_subcommand("scan", "Scan the hybrid Tsirelson envelope on a periodic grid");
    scan->add_option("--grid", grid, "Resolution per angle (default 1000)");

    auto* reproduce_cmd = app.add_subcommand("reproduce", "Run a named reproduction target or 'all'");
    reproduce_cmd->add_option("target", target, "Target name or 'all'")->required();
    reproduce_cmd->add_option("--shots", shots, "Monte Carlo shots");
    reproduce_cmd->add_option("--seed", seed, "Master seed");
    reproduce_cmd->add_option("--grid", grid, "Envelope grid resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*derive) {
            std::optional<ScenarioSpec> scenario;
            if (!scenario_path.empty()) scenario = parse_scenario(read_file(scenario_path));
            emit(derive_report(parse_rs(read_file(input)), scenario), format);
            return 0;
        }
        if (*check) {
            const auto scenario = parse_scenario(read_file(scenario_path));
            const auto observed = parse_observations(read_file(observations_path));
            FeasibilityOptions opts;
            opts.tolerance = tolerance;
            const auto result = jd_feasibility(scenario, observed, opts);
            emit(check_report(scenario, observed, result), format);
            return result.feasible ? 0 : 1;
        }
        if (*optimize) {
            const auto ineq = derive_inequality(parse_rs(read_file(input)));
            const auto scenario = parse_scenario(read_file(scenario_path));
            const auto assignment = assign_terms(ineq, scenario);
            SettingsParametrization param;
            param.variables = ineq.variables();
            if (mode_name == "sphere") param.mode = SettingsMode::FullSphere;
            else if (mode_name != "coplanar") throw Error(ErrorCode::InvalidArgument, "unknown mode '" + mode_name + "'");
            if (family_name == "fixed") {
                param.family = StateFamily::Fixed;
                param.fixed_state = state_by_name(state_name, quarter_turn_ladder(LadderOrientation::Aligned));
            } else if (family_name == "aligned-y2") {
                param.family = StateFamily::AlignedWith;
                param.aligned_variable = VariableId('Y', 2);
            } else if (family_name == "product-shared") {
                param.family = StateFamily::ProductShared;
            } else if (family_name == "product-free") {
                param.family = StateFamily::ProductIndependent;
            } else {
                throw Error(ErrorCode::InvalidArgument, "unknown family '" + family_name + "'");
            }
            OptimizeOptions opts;
            if (grid) opts.grid = grid;
            if (optimize->count("--seed")) opts.seed = seed;
            const auto best = maximize_violation(ineq, assignment, param, opts);
            const double norm = operator_norm(correlation_operator(ineq, best.settings, assignment));
            Json j = optimization_json(best, norm);
            j["inequality"] = inequality_json(ineq);
            emit(j, format);
            return 0;
        }
        if (*simulate) {
            const auto ladder = ladder_by_name(ladder_name);
            const auto rho = state_by_name(state_name, ladder);
            if (!log_path.empty()) {
                std::ofstream log(log_path);
                if (!log) throw Error(ErrorCode::InvalidArgument, "cannot write '" + log_path + "'");
                for (const auto& shot : simulate_schedule(rho, ladder, 0, log_count ? log_count : shots, seed)) {
                    log << format_shot(shot) << '\n';
                }
            }
            Json j = f_estimate_json(estimate_f(rho, ladder, shots, seed));
            j["seed"] = seed;
            j["state"] = state_name;
            j["ladder"] = ladder_name;
            emit(j, format);
            return 0;
        }
        if (*signaling) {
            const auto ladder = ladder_by_name(ladder_name);
            Json j = signaling_json(signaling_test(state_by_name(state_name, ladder), ladder, shots, seed));
            j["seed"] = seed;
            emit(j, format);
            return 0;
        }
        if (*scan) {
            const auto result = scan_envelope(grid ? grid : 1000);
            if (format == Format::Csv) {
                result.write_csv(std::cout);
                return 0;
            }
            Json argmax = Json::array();
            for (const auto& p : result.argmax) argmax.push_back({p.theta1, p.theta2});
            emit({{"resolution", result.resolution},
                  {"max", measured(result.max, 1e-12)},
                  {"bound", measured(2 * std::numbers::sqrt2, 1e-12)},
                  {"argmax", argmax}},
                 format);
            return 0;
        }
        if (*reproduce_cmd) {
            ReproduceOptions opts;
            opts.shots = shots;
            opts.seed = seed;
            if (grid) opts.envelope_grid = grid;
            std::vector<std::string> targets;
            if (target == "all") targets = reproduce_targets();
            else targets.push_back(target);
            Json all = Json::array();
            bool ok = true;
            for (const auto& t : targets) {
                const auto r = reproduce(t, opts);
                ok &= r.passed();
                for (const auto& c : r.checks) {
                    if (c.passed) continue;
                    std::cerr << error_code_name(ErrorCode::AssertionFailure) << ": " << t << ": " << c.name;
                    if (c.detail.contains("expected")) std::cerr << " expected=" << c.detail["expected"].dump();
                    if (c.detail.contains("actual")) std::cerr << " actual=" << c.detail["actual"].dump();
                    std::cerr << '\n';
                }
                if (format == Format::Human) {
                    std::cout << (r.passed() ? "[PASS] " : "[FAIL] ") << t << '\n';
                    for (const auto& c : r.checks) {
                        std::cout << "  " << (c.passed ? "ok   " : "FAIL ") << c.name;
                        if (c.detail.contains("actual")) std::cout << "  actual=" << c.detail["actual"].dump();
                        if (c.detail.contains("expected")) std::cout << " expected=" << c.detail["expected"].dump();
                        std::cout << '\n';
                    }
                } else {
                    all.push_back(r.to_json());
                }
            }
            if (format != Format::Human) std::cout << (targets.size() == 1 ? all[0] : all).dump(2) << '\n';
            return ok ? 0 : 1;
        }
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
