// sqdctl: command-line front end over the sqd C API.
//
// Exit codes: 0 success, 1 usage or runtime error, 2 config/validation
// failure, 3 assumption failure under --strict, 4 mismatch under
// `reproduce --assert`.

#include <sqd/sqd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitStrict = 3;
constexpr int kExitAssert = 4;

struct Failure {
    int code;
    std::string message;
};

struct ModelFree {
    void operator()(sqd_model* m) const { sqd_model_free(m); }
};
struct SolutionFree {
    void operator()(sqd_solution* s) const { sqd_solution_free(s); }
};
using ModelPtr = std::unique_ptr<sqd_model, ModelFree>;
using SolutionPtr = std::unique_ptr<sqd_solution, SolutionFree>;

std::string take(char* s) {
    std::string out = s ? s : "";
    sqd_string_free(s);
    return out;
}

// Model-level problems map to exit 2, everything else to 1.
void ok_or(sqd_status st, int code = kExitRuntime) {
    if (st == SQD_OK) return;
    if (st == SQD_E_VALIDATION) code = kExitConfig;
    throw Failure{code, sqd_last_error()};
}

struct Flags {
    std::string config;
    std::string out = ".";
    int grid = 0;
    int horizon = 200;
    double tol = 0.0;
    std::uint64_t seed = 1;
    bool svg = false;
    bool strict = false;
    bool assert_ok = false;
};

void write_file(const Flags& f, const std::string& name, const std::string& text) {
    fs::create_directories(f.out);
    const fs::path p = fs::path(f.out) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Failure{kExitRuntime, "cannot write " + p.string()};
    os << text;
    std::cout << "wrote " << p.string() << "\n";
}

// A path to a JSON file, or the name of a built-in preset.
ModelPtr load_model(const std::string& spec) {
    sqd_model* raw = nullptr;
    if (fs::exists(spec)) {
        std::ifstream is(spec, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        const std::string text = ss.str();
        if (sqd_model_from_json(text.c_str(), &raw) != SQD_OK)
            throw Failure{kExitConfig, spec + ": " + sqd_last_error()};
    } else if (sqd_model_from_preset(spec.c_str(), &raw) != SQD_OK) {
        throw Failure{kExitConfig, "'" + spec + "' is neither a readable file nor a preset name"};
    }
    return ModelPtr(raw);
}

// Loads and validates; prints the violation list and exits 2 when invalid.
ModelPtr load_valid(const std::string& spec) {
    ModelPtr m = load_model(spec);
    int ok = 0;
    char* report = nullptr;
    ok_or(sqd_model_validate(m.get(), &ok, &report));
    std::string text = take(report);
    if (!ok) throw Failure{kExitConfig, "invalid model:\n" + text};
    return m;
}

sqd_solve_options solve_opts(const Flags& f) {
    sqd_solve_options o;
    sqd_solve_options_default(&o);
    o.grid = f.grid;
    o.horizon = f.horizon;
    o.tol = f.tol;
    return o;
}

SolutionPtr solve(const sqd_model* m, sqd_solver solver, const sqd_solve_options& o) {
    sqd_solution* raw = nullptr;
    ok_or(sqd_solve(m, solver, &o, &raw));
    return SolutionPtr(raw);
}

sqdctl::PlotData plot_data(const sqd_solution* s, const std::string& title) {
    sqdctl::PlotData d;
    d.X = sqd_solution_dim(s);
    const size_t n = sqd_solution_size(s);
    d.points.assign(n, std::vector<double>(static_cast<size_t>(d.X)));
    for (size_t i = 0; i < n; ++i) ok_or(sqd_solution_point(s, i, d.points[i].data(), d.points[i].size()));
    d.V.resize(n);
    d.mu.resize(n);
    ok_or(sqd_solution_arrays(s, d.V.data(), nullptr, d.mu.data(), nullptr));
    d.title = title;
    return d;
}

json write_solution(const Flags& f, const sqd_solution* s, const std::string& title) {
    char* csv = nullptr;
    ok_or(sqd_solution_value_csv(s, &csv));
    write_file(f, "value.csv", take(csv));
    char* js = nullptr;
    ok_or(sqd_solution_summary_json(s, &js));
    json summary = json::parse(take(js));
    if (f.svg) write_file(f, "policy.svg", sqdctl::render_svg(plot_data(s, title)));
    return summary;
}

void print_solution(const json& s) {
    std::cout << "iterations " << s["iterations"] << ", sup-delta " << s["sup_delta"].get<double>() << ", "
              << s["stop_points"] << " of " << s["points"] << " grid points stop\n";
    if (s.contains("stop_intervals"))
        for (const auto& iv : s["stop_intervals"])
            std::cout << "  stop on pi(2) in [" << iv["lo"].get<double>() << ", " << iv["hi"].get<double>() << "]\n";
    if (s.contains("lines_e1_last_region"))
        std::cout << "  max switches per line in P_{Y+1}: " << s["lines_e1_last_region"]["max_switches"]
                  << " (through e1), " << s["lines_eX_last_region"]["max_switches"] << " (through e3)\n";
}

int cmd_validate(const Flags& f) {
    ModelPtr m = load_model(f.config);
    int ok = 0;
    char* report = nullptr;
    ok_or(sqd_model_validate(m.get(), &ok, &report));
    std::string text = take(report);
    int X = 0, Y = 0, A = 0;
    sqd_model_dims(m.get(), &X, &Y, &A);
    json s{{"schema_version", SQD_SUMMARY_SCHEMA_VERSION}, {"valid", ok == 1}, {"X", X}, {"Y", Y}, {"A", A},
           {"sensing", sqd_model_is_sensing(m.get()) == 1}, {"report", text}};
    write_file(f, "summary.json", s.dump(2));
    if (!ok) {
        std::cerr << text;
        return kExitConfig;
    }
    std::cout << "valid: X = " << X << ", Y = " << Y << ", A = " << A << "\n";
    return 0;
}

int cmd_check(const Flags& f, double slack, const std::vector<std::string>& required) {
    ModelPtr m = load_valid(f.config);
    char* js = nullptr;
    ok_or(sqd_model_check(m.get(), slack, &js));
    json entries = json::parse(take(js));
    std::ostringstream csv;
    csv << "condition,status,witness\n";
    std::vector<std::string> failed;
    for (const auto& e : entries) {
        const std::string name = e["name"], status = e["status"], wit = e["witness"];
        std::printf("%-18s %s%s%s\n", name.c_str(), status.c_str(), wit.empty() ? "" : "  ", wit.c_str());
        std::string quoted = wit;
        for (size_t p = 0; (p = quoted.find('"', p)) != std::string::npos; p += 2) quoted.insert(p, "\"");
        csv << name << "," << status << ",\"" << quoted << "\"\n";
        bool wanted = required.empty() || std::find(required.begin(), required.end(), name) != required.end();
        if (wanted && status == "fail") failed.push_back(name);
    }
    for (const auto& r : required) {
        bool found = false;
        for (const auto& e : entries) found = found || e["name"] == r;
        if (!found) throw Failure{kExitRuntime, "unknown condition '" + r + "'"};
    }
    write_file(f, "check.csv", csv.str());
    json s{{"schema_version", SQD_SUMMARY_SCHEMA_VERSION}, {"conditions", entries}, {"failed", failed}};
    write_file(f, "summary.json", s.dump(2));
    if (f.strict && !failed.empty()) {
        std::cerr << failed.size() << " required condition(s) failed\n";
        return kExitStrict;
    }
    return 0;
}

int cmd_partition(const Flags& f) {
    ModelPtr m = load_valid(f.config);
    char* csv = nullptr;
    ok_or(sqd_model_partition_csv(m.get(), &csv));
    write_file(f, "partition.csv", take(csv));
    char* js = nullptr;
    ok_or(sqd_model_partition_json(m.get(), &js));
    json p = json::parse(take(js));
    p["schema_version"] = SQD_SUMMARY_SCHEMA_VERSION;
    write_file(f, "summary.json", p.dump(2));
    std::cout << p["regions"].size() << " regions, nesting " << (p["nesting_verified"] ? "verified" : "not verified")
              << ", i* " << p["istar_direction"].get<std::string>() << "\n";
    return 0;
}

int cmd_solve(const Flags& f, bool classical, bool nearest, double beta, sqd_solver solver) {
    ModelPtr m = load_valid(f.config);
    sqd_solve_options o = solve_opts(f);
    o.nearest = nearest ? 1 : 0;
    o.beta = beta;
    if (solver == SQD_SOLVER_SOCIAL && classical) solver = SQD_SOLVER_CLASSICAL;
    SolutionPtr s = solve(m.get(), solver, o);
    json summary = write_solution(f, s.get(), f.config);
    write_file(f, "summary.json", summary.dump(2));
    print_solution(summary);
    return 0;
}

int cmd_compare(const Flags& f) {
    ModelPtr m = load_valid(f.config);
    sqd_solve_options o = solve_opts(f);
    SolutionPtr social = solve(m.get(), SQD_SOLVER_SOCIAL, o);
    SolutionPtr classical = solve(m.get(), SQD_SOLVER_CLASSICAL, o);
    double gap = 0.0;
    ok_or(sqd_blackwell_gap(social.get(), classical.get(), &gap));
    const size_t n = sqd_solution_size(social.get());
    const int X = sqd_solution_dim(social.get());
    std::vector<double> vs(n), vc(n), pi(static_cast<size_t>(X));
    ok_or(sqd_solution_arrays(social.get(), vs.data(), nullptr, nullptr, nullptr));
    ok_or(sqd_solution_arrays(classical.get(), vc.data(), nullptr, nullptr, nullptr));
    std::ostringstream csv;
    csv.precision(17);
    csv << "index";
    for (int i = 1; i <= X; ++i) csv << ",pi_" << i;
    csv << ",V_social,V_classical\n";
    for (size_t g = 0; g < n; ++g) {
        ok_or(sqd_solution_point(social.get(), g, pi.data(), pi.size()));
        csv << g;
        for (double v : pi) csv << "," << v;
        csv << "," << vs[g] << "," << vc[g] << "\n";
    }
    write_file(f, "compare.csv", csv.str());
    json s{{"schema_version", SQD_SUMMARY_SCHEMA_VERSION},
           {"min_gap", gap},
           {"social_dominates", gap >= -1e-9},
           {"points", n}};
    write_file(f, "summary.json", s.dump(2));
    std::cout << "min over grid of V_social - V_classical = " << gap << "\n";
    return 0;
}

int cmd_bound(const Flags& f) {
    ModelPtr m = load_valid(f.config);
    sqd_solve_options o = solve_opts(f);
    char* js = nullptr;
    ok_or(sqd_bound_check(m.get(), &o, &js));
    json b = json::parse(take(js));
    write_file(f, "summary.json", b.dump(2));
    std::cout << "eps " << b["eps"].get<double>() << ": max LHS " << b["max_lhs"].get<double>() << " vs RHS "
              << b["rhs"].get<double>() << " (" << (b["holds"] ? "holds" : "violated") << ")\n";
    return 0;
}

int cmd_spsa(const Flags& f, int iterations, int priors, int heldout, double calibrate, std::vector<double> theta0) {
    ModelPtr m = load_valid(f.config);
    sqd_spsa_options o;
    sqd_spsa_options_default(&o);
    if (iterations > 0) o.iterations = iterations;
    if (priors > 0) o.priors = priors;
    if (heldout > 0) o.heldout = heldout;
    o.calibrate_step = calibrate;
    o.seed = f.seed;
    o.theta0 = theta0.empty() ? nullptr : theta0.data();
    char* js = nullptr;
    char* trace = nullptr;
    ok_or(sqd_spsa(m.get(), &o, &js, &trace));
    json r = json::parse(take(js));
    r["schema_version"] = SQD_SUMMARY_SCHEMA_VERSION;
    r["seed"] = f.seed;
    write_file(f, "theta_trace.csv", take(trace));
    write_file(f, "summary.json", r.dump(2));
    std::cout << "theta* = " << r["theta_star"].dump() << ", held-out cost " << r["best_cost"].get<double>() << "\n";
    return 0;
}

int cmd_simulate(const Flags& f, const std::string& policy, std::vector<double> theta, long reps, long cap) {
    ModelPtr m = load_valid(f.config);
    sqd_policy p{};
    SolutionPtr sol;
    if (policy == "dp") {
        sol = solve(m.get(), SQD_SOLVER_SOCIAL, solve_opts(f));
        p.kind = SQD_POLICY_GRID;
        p.solution = sol.get();
    } else if (policy == "myopic") {
        p.kind = SQD_POLICY_MYOPIC;
    } else if (policy == "linear") {
        if (theta.empty()) throw Failure{kExitRuntime, "--theta is required for the linear policy"};
        p.kind = SQD_POLICY_LINEAR;
        p.theta = theta.data();
        p.theta_len = theta.size();
    } else if (policy == "stop") {
        p.kind = SQD_POLICY_STOP;
    } else {
        p.kind = SQD_POLICY_CONTINUE;
    }
    char* js = nullptr;
    char* csv = nullptr;
    ok_or(sqd_simulate(m.get(), &p, reps, f.seed, cap, &js, &csv));
    json r = json::parse(take(js));
    r["schema_version"] = SQD_SUMMARY_SCHEMA_VERSION;
    r["policy"] = policy;
    r["seed"] = f.seed;
    write_file(f, "sim.csv", take(csv));
    write_file(f, "summary.json", r.dump(2));
    auto show = [&](const char* label, const char* key) {
        std::cout << "  " << label << " " << r[key]["mean"].get<double>() << " +- " << r[key]["se"].get<double>()
                  << "\n";
    };
    std::cout << reps << " replications\n";
    show("delay", "mean_delay");
    show("false alarm", "false_alarm_prob");
    show("cost", "mean_realized_cost");
    return 0;
}

int cmd_sensing(const Flags& f) {
    ModelPtr m = load_valid(f.config);
    if (!sqd_model_is_sensing(m.get())) throw Failure{kExitConfig, "sensing needs a config with B1 and B2"};
    SolutionPtr s = solve(m.get(), SQD_SOLVER_SENSING, solve_opts(f));
    json summary = write_solution(f, s.get(), f.config + " (sensing)");
    char* js = nullptr;
    ok_or(sqd_model_check(m.get(), 1e-12, &js));
    summary["conditions"] = json::parse(take(js));
    write_file(f, "summary.json", summary.dump(2));
    print_solution(summary);
    for (const auto& e : summary["conditions"]) std::cout << "  " << e["name"].get<std::string>() << " "
                                                          << e["status"].get<std::string>() << "\n";
    return 0;
}

int cmd_reproduce(const Flags& f) {
    int ok = 0;
    char* js = nullptr;
    sqd_solution* raw = nullptr;
    sqd_status st = sqd_reproduce(f.config.c_str(), f.grid, f.horizon, &ok, &js, &raw);
    if (st == SQD_E_INVALID_ARGUMENT) throw Failure{kExitConfig, sqd_last_error()};
    ok_or(st);
    SolutionPtr sol(raw);
    json r = json::parse(take(js));
    char* csv = nullptr;
    ok_or(sqd_solution_value_csv(sol.get(), &csv));
    write_file(f, "value.csv", take(csv));
    if (f.svg) write_file(f, "policy.svg", sqdctl::render_svg(plot_data(sol.get(), f.config)));
    write_file(f, "summary.json", r.dump(2));
    std::cout << f.config << ": " << r["expected"].get<std::string>() << "\n";
    for (const auto& c : r["checks"])
        std::cout << "  " << (c["ok"] ? "ok   " : "MISS ") << c["name"].get<std::string>() << ": "
                  << c["detail"].get<std::string>() << "\n";
    if (f.assert_ok && !ok) return kExitAssert;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quickest change detection with social learning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sqd_version()));

    Flags f;
    auto common = [&f](CLI::App* sub, bool solver_flags) {
        sub->add_option("config", f.config, "model JSON file or preset name")->required();
        sub->add_option("--out", f.out, "output directory");
        if (solver_flags) {
            sub->add_option("--grid", f.grid, "grid points (X=2) or lattice density (X=3)");
            sub->add_option("--horizon", f.horizon, "value-iteration sweeps");
            sub->add_option("--tol", f.tol, "stop early once sup-delta is below this");
            sub->add_flag("--svg", f.svg, "also write policy.svg");
        }
    };

    CLI::App* validate = app.add_subcommand("validate", "check model invariants");
    common(validate, false);

    double slack = 1e-12;
    std::vector<std::string> required;
    CLI::App* check = app.add_subcommand("check", "report structural conditions");
    common(check, false);
    check->add_option("--slack", slack, "inequality slack");
    check->add_option("--require", required, "conditions that must pass (default: all)")->delimiter(',');
    check->add_flag("--strict", f.strict, "exit 3 when a required condition fails");

    CLI::App* partition = app.add_subcommand("partition", "decision-likelihood partition");
    common(partition, false);

    bool classical = false, nearest = false;
    double beta = 0.0;
    CLI::App* solve_cmd = app.add_subcommand("solve", "value iteration");
    common(solve_cmd, true);
    solve_cmd->add_flag("--classical", classical, "use raw observations instead of local decisions");
    solve_cmd->add_flag("--nearest", nearest, "nearest-neighbour interpolation");
    solve_cmd->add_option("--beta", beta, "weight of the expected operating cost");

    CLI::App* compare = app.add_subcommand("compare", "social vs classical value functions");
    common(compare, true);

    CLI::App* bound = app.add_subcommand("bound", "small-eps suboptimality bound");
    common(bound, true);

    int iterations = 0, priors = 0, heldout = 0;
    double calibrate = 0.0;
    std::vector<double> theta;
    CLI::App* spsa = app.add_subcommand("spsa", "optimize a linear threshold policy");
    common(spsa, false);
    spsa->add_option("--seed", f.seed, "random seed");
    spsa->add_option("--iterations", iterations, "SPSA iterations");
    spsa->add_option("--priors", priors, "sample paths per cost estimate");
    spsa->add_option("--heldout", heldout, "sample paths for held-out evaluation");
    spsa->add_option("--calibrate", calibrate, "target size of the first step (0 keeps the default gain)");
    spsa->add_option("--theta0", theta, "starting point")->delimiter(',');

    std::string policy = "dp";
    long reps = 10000, cap = 0;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo under a policy");
    common(simulate, true);
    simulate->add_option("--seed", f.seed, "random seed");
    simulate->add_option("--policy", policy, "dp, myopic, linear, stop or continue")
        ->check(CLI::IsMember({"dp", "myopic", "linear", "stop", "continue"}));
    simulate->add_option("--theta", theta, "linear threshold")->delimiter(',');
    simulate->add_option("--reps", reps, "replications")->check(CLI::PositiveNumber);
    simulate->add_option("--cap", cap, "epoch cap per replication (0: default)");

    CLI::App* sensing = app.add_subcommand("sensing", "value iteration with controlled sensing");
    common(sensing, true);

    CLI::App* reproduce = app.add_subcommand("reproduce", "run a preset and check its expected outcome");
    common(reproduce, true);
    reproduce->add_flag("--assert", f.assert_ok, "exit 4 when an expected outcome is missed");
    reproduce->add_option("--seed", f.seed, "random seed (presets are deterministic)");

    CLI::App* list = app.add_subcommand("presets", "list presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitRuntime;
    }

    try {
        if (*list) {
            char* names = nullptr;
            ok_or(sqd_preset_names(&names));
            std::cout << take(names);
            return 0;
        }
        if (*validate) return cmd_validate(f);
        if (*check) return cmd_check(f, slack, required);
        if (*partition) return cmd_partition(f);
        if (*solve_cmd) return cmd_solve(f, classical, nearest, beta, SQD_SOLVER_SOCIAL);
        if (*compare) return cmd_compare(f);
        if (*bound) return cmd_bound(f);
        if (*spsa) return cmd_spsa(f, iterations, priors, heldout, calibrate, theta);
        if (*simulate) return cmd_simulate(f, policy, theta, reps, cap);
        if (*sensing) return cmd_sensing(f);
        if (*reproduce) return cmd_reproduce(f);
    } catch (const Failure& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
