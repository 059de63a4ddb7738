#include "sqd/sqd.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <iomanip>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "dp.hpp"
#include "error.hpp"
#include "filters.hpp"
#include "geometry.hpp"
#include "orders.hpp"
#include "presets.hpp"
#include "sensing.hpp"
#include "sim.hpp"
#include "threshold_opt.hpp"

using nlohmann::json;

struct sqd_model {
    bool sensing = false;
    sqd::DetectionModel m;
    sqd::SensingModel sm;
    const sqd::DetectionModel& detection() const { return sensing ? sm.base : m; }
};

struct sqd_solution {
    sqd::PolicySolution sol;
    sqd::DetectionModel model;
};

namespace {

thread_local std::string g_last_error;

sqd_status fail(sqd_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

template <class F>
sqd_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return SQD_OK;
    } catch (const sqd::Error& e) {
        return fail(static_cast<sqd_status>(static_cast<int>(e.code())), e.what());
    } catch (const json::exception& e) {
        return fail(SQD_E_VALIDATION, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SQD_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SQD_E_INTERNAL, e.what());
    }
}

void need(const void* p, const char* what) {
    if (!p) throw sqd::Error(sqd::Errc::invalid_argument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put(char** out, const std::string& s) {
    if (out) *out = dup(s);
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

sqd::SolveOptions solve_options(const sqd_solve_options* o) {
    sqd::SolveOptions s;
    if (!o) return s;
    s.horizon = o->horizon;
    s.tol = o->tol;
    s.interp = o->nearest ? sqd::Interpolation::nearest : sqd::Interpolation::linear;
    s.init = o->zero_init ? sqd::InitialValue::zero : sqd::InitialValue::neg_false_alarm;
    s.beta = o->beta;
    return s;
}

int grid_of(const sqd_solve_options* o, int X) {
    if (o && o->grid > 0) return o->grid;
    return X == 2 ? 500 : 50;
}

json scan_json(const sqd::LineScan& s) {
    return {{"lines", s.lines}, {"max_switches", s.max_switches}, {"lines_over_one", s.lines_over_one},
            {"worst_line", s.worst_line}};
}

json summary_of(const sqd::PolicySolution& sol, const sqd::DetectionModel& m) {
    json j;
    j["schema_version"] = SQD_SUMMARY_SCHEMA_VERSION;
    j["kind"] = sol.kind;
    j["X"] = sol.grid.X;
    j["resolution"] = sol.grid.resolution;
    j["points"] = sol.grid.size();
    j["iterations"] = sol.iterations;
    j["sup_delta"] = sol.final_sup_delta;
    std::size_t stops = 0;
    for (int u : sol.mu) stops += u == 1;
    j["stop_points"] = stops;
    sqd::StoppingSummary ss = sqd::stopping_set(sol);
    if (sol.grid.X == 2) {
        json iv = json::array();
        for (const auto& i : ss.intervals) iv.push_back({{"lo", i.lo}, {"hi", i.hi}});
        j["stop_intervals"] = iv;
        j["crossings"] = ss.crossings;
    } else {
        j["boundary_points"] = ss.boundary.size();
        j["lines_e1"] = scan_json(ss.through_e1);
        j["lines_eX"] = scan_json(ss.through_eX);
        if (m.A == 2) {
            sqd::LineCheck lc = sqd::line_monotonicity_check(m, sol);
            j["lines_e1_last_region"] = scan_json(lc.e1);
            j["lines_eX_last_region"] = scan_json(lc.eX);
        }
    }
    return j;
}

json report_json(const sqd::AssumptionReport& r) {
    json a = json::array();
    for (const auto& e : r.entries)
        a.push_back({{"name", e.name}, {"status", sqd::status_name(e.status)}, {"witness", e.witness},
                     {"margin", e.margin}});
    return a;
}

json matrix_json(const sqd::Matrix& M) {
    json rows = json::array();
    for (std::size_t i = 0; i < M.rows(); ++i) rows.push_back(M.row(i));
    return rows;
}

json sim_json(const sqd::SimReport& r) {
    auto est = [](const sqd::Estimate& e) { return json{{"mean", e.mean}, {"se", e.se}}; };
    return {{"replications", r.replications},
            {"mean_delay", est(r.mean_delay)},
            {"false_alarm_prob", est(r.false_alarm_prob)},
            {"mean_discounted_cost", est(r.mean_discounted_cost)},
            {"mean_belief_cost", est(r.mean_belief_cost)},
            {"mean_realized_cost", est(r.mean_realized_cost)},
            {"mean_tau", est(r.mean_tau)},
            {"cascade_rate", r.cascade_rate},
            {"truncated", r.truncated}};
}

}  // namespace

extern "C" {

const char* sqd_version(void) { return "1.0.0"; }

const char* sqd_last_error(void) { return g_last_error.c_str(); }

void sqd_string_free(char* s) { std::free(s); }

sqd_status sqd_model_from_json(const char* text, sqd_model** out) {
    return guarded([&] {
        need(text, "json");
        need(out, "out");
        json j = sqd::parse_json_text(text);
        auto h = std::make_unique<sqd_model>();
        if (sqd::is_sensing_config(j)) {
            h->sensing = true;
            h->sm = sqd::sensing_from_json(j);
        } else {
            h->m = sqd::model_from_json(j);
        }
        *out = h.release();
    });
}

sqd_status sqd_model_from_preset(const char* name, sqd_model** out) {
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        auto h = std::make_unique<sqd_model>();
        h->m = sqd::find_preset(name).model;
        *out = h.release();
    });
}

void sqd_model_free(sqd_model* m) { delete m; }

sqd_status sqd_preset_names(char** out) {
    return guarded([&] {
        need(out, "out");
        std::string s;
        for (const auto& p : sqd::presets()) s += p.name + "\n";
        put(out, s);
    });
}

sqd_status sqd_preset_info(const char* name, char** out_json) {
    return guarded([&] {
        need(name, "name");
        need(out_json, "out_json");
        const sqd::ExperimentPreset& p = sqd::find_preset(name);
        json j{{"name", p.name}, {"description", p.description}, {"grid", p.grid}, {"horizon", p.horizon},
               {"expected", p.expected}, {"model", sqd::model_to_json(p.model)}};
        put(out_json, j.dump(2));
    });
}

sqd_status sqd_model_to_json(const sqd_model* m, char** out) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        put(out, (m->sensing ? sqd::sensing_to_json(m->sm) : sqd::model_to_json(m->m)).dump(2));
    });
}

sqd_status sqd_model_dims(const sqd_model* m, int* X, int* Y, int* A) {
    return guarded([&] {
        need(m, "model");
        const auto& d = m->detection();
        if (X) *X = d.X;
        if (Y) *Y = d.Y;
        if (A) *A = d.A;
    });
}

int sqd_model_is_sensing(const sqd_model* m) { return m && m->sensing ? 1 : 0; }

sqd_status sqd_model_validate(const sqd_model* m, int* ok, char** report) {
    return guarded([&] {
        need(m, "model");
        sqd::ValidationReport r = m->sensing ? sqd::validate_sensing(m->sm) : sqd::validate_model(m->m);
        if (ok) *ok = r.ok() ? 1 : 0;
        put(report, r.to_string());
    });
}

sqd_status sqd_model_check(const sqd_model* m, double slack, char** out_json) {
    return guarded([&] {
        need(m, "model");
        need(out_json, "out_json");
        sqd::AssumptionReport r = m->sensing ? sqd::check_sensing_assumptions(m->sm, slack)
                                             : sqd::check_assumptions(m->m, slack);
        put(out_json, report_json(r).dump(2));
    });
}

sqd_status sqd_model_partition_csv(const sqd_model* m, char** out_csv) {
    return guarded([&] {
        need(m, "model");
        need(out_csv, "out_csv");
        const auto& d = m->detection();
        sqd::require_valid(d);
        sqd::PolytopePartition part = sqd::build_partition(d);
        std::ostringstream os;
        // Region l is bounded below by n_{l-1} and above by n_l; missing sides stay empty.
        os << "region";
        for (int i = 1; i <= d.X; ++i) os << ",lower_n_" << i;
        for (int i = 1; i <= d.X; ++i) os << ",upper_n_" << i;
        for (int i = 1; i <= d.X; ++i)
            for (int a = 1; a <= 2; ++a) os << ",R_" << i << "_" << a;
        os << "\n";
        const int Y = static_cast<int>(part.normals.size());
        for (const auto& r : part.regions) {
            os << r.l;
            for (int side = 0; side < 2; ++side) {
                const int y = side == 0 ? r.l - 2 : r.l - 1;
                for (int i = 0; i < d.X; ++i) {
                    os << ",";
                    if (y >= 0 && y < Y) os << num(part.normals[y][i]);
                }
            }
            for (std::size_t i = 0; i < r.R.rows(); ++i)
                for (std::size_t a = 0; a < r.R.cols(); ++a) os << "," << num(r.R(i, a));
            os << "\n";
        }
        put(out_csv, os.str());
    });
}

sqd_status sqd_model_partition_json(const sqd_model* m, char** out_json) {
    return guarded([&] {
        need(m, "model");
        need(out_json, "out_json");
        const auto& d = m->detection();
        sqd::require_valid(d);
        sqd::PolytopePartition part = sqd::build_partition(d);
        json regions = json::array();
        for (const auto& r : part.regions)
            regions.push_back({{"l", r.l}, {"M", matrix_json(r.M)}, {"R", matrix_json(r.R)}});
        json j{{"normals", part.normals},
               {"regions", regions},
               {"assumptions_hold", part.assumptions_hold},
               {"nesting_verified", part.nesting_verified},
               {"nesting_note", part.nesting_note},
               {"istar", part.istar},
               {"istar_direction", part.istar_direction}};
        if (d.X == 2) {
            json cuts = json::array();
            for (const auto& n : part.normals) {
                double den = n[0] - n[1];
                if (den != 0.0) cuts.push_back(n[0] / den);
                else cuts.push_back(nullptr);
            }
            j["pi2_roots"] = cuts;
        }
        put(out_json, j.dump(2));
    });
}

sqd_status sqd_model_classify(const sqd_model* m, const double* pi, size_t n, int* label) {
    return guarded([&] {
        need(m, "model");
        need(pi, "pi");
        need(label, "label");
        const auto& d = m->detection();
        if (n != static_cast<size_t>(d.X)) throw sqd::Error(sqd::Errc::invalid_argument, "belief has the wrong length");
        *label = sqd::classify(sqd::Vec(pi, pi + n), sqd::build_partition(d));
    });
}

sqd_status sqd_model_transformed_cost(const sqd_model* m, double* out, size_t n) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        sqd::Vec C = sqd::transformed_cost(m->detection());
        if (n < C.size()) throw sqd::Error(sqd::Errc::invalid_argument, "output buffer too small");
        std::copy(C.begin(), C.end(), out);
    });
}

sqd_status sqd_ph_pmf(const sqd_model* m, int k, double* out) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        if (k < 0) throw sqd::Error(sqd::Errc::invalid_argument, "k must be >= 0");
        *out = sqd::ph_pmf(m->detection(), k);
    });
}

sqd_status sqd_sequential_threshold(const sqd_model* m, double* out) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        *out = sqd::sequential_threshold(m->detection());
    });
}

sqd_status sqd_geometric_threshold(const sqd_model* m, double* out) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        *out = sqd::geometric_threshold(m->detection());
    });
}

sqd_status sqd_fixed_points(const sqd_model* m, char** out_json) {
    return guarded([&] {
        need(m, "model");
        need(out_json, "out_json");
        sqd::FixedPoints f = sqd::fixed_points(m->detection());
        json j{{"eta1", f.eta1},           {"eta2", f.eta2},
               {"q", f.q},                 {"q_mismatch", f.q_mismatch},
               {"symmetric_b", f.symmetric_b}, {"composite_eta1", f.composite_eta1},
               {"composite_eta2", f.composite_eta2}};
        put(out_json, j.dump(2));
    });
}

void sqd_solve_options_default(sqd_solve_options* opt) {
    if (!opt) return;
    opt->grid = 0;
    opt->horizon = 200;
    opt->tol = 0.0;
    opt->nearest = 0;
    opt->zero_init = 0;
    opt->beta = 0.0;
}

sqd_status sqd_solve(const sqd_model* m, sqd_solver solver, const sqd_solve_options* opt, sqd_solution** out) {
    return guarded([&] {
        need(m, "model");
        need(out, "out");
        const auto& d = m->detection();
        sqd::SimplexGrid grid = sqd::SimplexGrid::make(d.X, grid_of(opt, d.X));
        sqd::SolveOptions so = solve_options(opt);
        auto h = std::make_unique<sqd_solution>();
        h->model = d;
        switch (solver) {
            case SQD_SOLVER_SOCIAL: h->sol = sqd::value_iterate_social(d, grid, so); break;
            case SQD_SOLVER_CLASSICAL: h->sol = sqd::value_iterate_classical(d, grid, so); break;
            case SQD_SOLVER_SENSING:
                if (!m->sensing) throw sqd::Error(sqd::Errc::invalid_argument, "sensing solver needs B1 and B2");
                h->sol = sqd::value_iterate_sensing(m->sm, grid, so);
                break;
            default: throw sqd::Error(sqd::Errc::invalid_argument, "unknown solver");
        }
        *out = h.release();
    });
}

void sqd_solution_free(sqd_solution* s) { delete s; }

size_t sqd_solution_size(const sqd_solution* s) { return s ? s->sol.grid.size() : 0; }

int sqd_solution_dim(const sqd_solution* s) { return s ? s->sol.grid.X : 0; }

int sqd_solution_iterations(const sqd_solution* s) { return s ? s->sol.iterations : 0; }

double sqd_solution_sup_delta(const sqd_solution* s) { return s ? s->sol.final_sup_delta : 0.0; }

sqd_status sqd_solution_point(const sqd_solution* s, size_t i, double* pi, size_t n) {
    return guarded([&] {
        need(s, "solution");
        need(pi, "pi");
        if (i >= s->sol.grid.size()) throw sqd::Error(sqd::Errc::invalid_argument, "grid index out of range");
        const auto& p = s->sol.grid.points[i];
        if (n < p.size()) throw sqd::Error(sqd::Errc::invalid_argument, "output buffer too small");
        std::copy(p.begin(), p.end(), pi);
    });
}

sqd_status sqd_solution_arrays(const sqd_solution* s, double* V, double* Vbar, int* mu, int* region) {
    return guarded([&] {
        need(s, "solution");
        const auto& sol = s->sol;
        if (V) std::copy(sol.V.begin(), sol.V.end(), V);
        if (Vbar) std::copy(sol.Vbar.begin(), sol.Vbar.end(), Vbar);
        if (mu) std::copy(sol.mu.begin(), sol.mu.end(), mu);
        if (region) std::copy(sol.region.begin(), sol.region.end(), region);
    });
}

sqd_status sqd_solution_value_csv(const sqd_solution* s, char** out_csv) {
    return guarded([&] {
        need(s, "solution");
        need(out_csv, "out_csv");
        const auto& sol = s->sol;
        std::ostringstream os;
        os << "index";
        for (int i = 1; i <= sol.grid.X; ++i) os << ",pi_" << i;
        os << ",V,Vbar,mu,region\n";
        for (std::size_t g = 0; g < sol.grid.size(); ++g) {
            os << g;
            for (double v : sol.grid.points[g]) os << "," << num(v);
            os << "," << num(sol.V[g]) << "," << num(sol.Vbar[g]) << "," << sol.mu[g] << "," << sol.region[g] << "\n";
        }
        put(out_csv, os.str());
    });
}

sqd_status sqd_solution_summary_json(const sqd_solution* s, char** out_json) {
    return guarded([&] {
        need(s, "solution");
        need(out_json, "out_json");
        put(out_json, summary_of(s->sol, s->model).dump(2));
    });
}

sqd_status sqd_blackwell_gap(const sqd_solution* social, const sqd_solution* classical, double* out) {
    return guarded([&] {
        need(social, "social");
        need(classical, "classical");
        need(out, "out");
        *out = sqd::blackwell_gap(social->sol, classical->sol);
    });
}

sqd_status sqd_bound_check(const sqd_model* m, const sqd_solve_options* opt, char** out_json) {
    return guarded([&] {
        need(m, "model");
        need(out_json, "out_json");
        const auto& d = m->detection();
        sqd::SimplexGrid grid = sqd::SimplexGrid::make(d.X, grid_of(opt, d.X));
        sqd::BoundReport b = sqd::corollary_bound_check(d, grid, solve_options(opt));
        json j{{"schema_version", SQD_SUMMARY_SCHEMA_VERSION},
               {"eps", b.eps},
               {"rhs", b.rhs},
               {"max_lhs", b.max_lhs},
               {"qualifying_points", b.qualifying},
               {"policy_agreement", b.agree},
               {"points", b.total},
               {"agreement_fraction", static_cast<double>(b.agree) / static_cast<double>(b.total)},
               {"holds", b.holds}};
        put(out_json, j.dump(2));
    });
}

void sqd_spsa_options_default(sqd_spsa_options* opt) {
    if (!opt) return;
    sqd::SpsaConfig c;
    opt->iterations = c.iterations;
    opt->a = c.a;
    opt->c = c.c;
    opt->A = c.A;
    opt->alpha = c.alpha;
    opt->gamma = c.gamma;
    opt->calibrate_step = c.calibrate_step;
    opt->priors = c.priors;
    opt->heldout = c.heldout;
    opt->eval_every = c.eval_every;
    opt->seed = c.seed;
    opt->theta0 = nullptr;
}

sqd_status sqd_spsa(const sqd_model* m, const sqd_spsa_options* opt, char** out_json, char** out_trace_csv) {
    return guarded([&] {
        need(m, "model");
        need(opt, "options");
        const auto& d = m->detection();
        sqd::SpsaConfig c;
        c.iterations = opt->iterations;
        c.a = opt->a;
        c.c = opt->c;
        c.A = opt->A;
        c.alpha = opt->alpha;
        c.gamma = opt->gamma;
        c.calibrate_step = opt->calibrate_step;
        c.priors = opt->priors;
        c.heldout = opt->heldout;
        c.eval_every = opt->eval_every;
        c.seed = opt->seed;
        if (opt->theta0) c.theta0.assign(opt->theta0, opt->theta0 + (d.X - 1));
        sqd::SpsaResult r = sqd::spsa_optimize(d, c);
        json j{{"theta_star", r.theta_star.theta},
               {"best_cost", r.best_cost},
               {"iterations", c.iterations},
               {"a_used", r.a_used},
               {"truncated_paths", r.truncated_paths},
               {"valid", sqd::validate_theta(r.theta_star).ok}};
        put(out_json, j.dump(2));
        if (out_trace_csv) {
            std::ostringstream os;
            os << "iteration";
            for (int i = 1; i < d.X; ++i) os << ",theta_" << i;
            os << ",cost\n";
            for (const auto& row : r.trace) {
                os << row.iteration;
                for (double v : row.theta) os << "," << num(v);
                os << "," << num(row.cost) << "\n";
            }
            put(out_trace_csv, os.str());
        }
    });
}

sqd_status sqd_linear_decide(const double* theta, size_t n, const double* pi, int* u) {
    return guarded([&] {
        need(theta, "theta");
        need(pi, "pi");
        need(u, "u");
        if (n < 1) throw sqd::Error(sqd::Errc::invalid_argument, "theta is empty");
        sqd::LinearThreshold t{sqd::Vec(theta, theta + n)};
        *u = sqd::linear_decide(t, sqd::Vec(pi, pi + n + 1));
    });
}

sqd_status sqd_simulate(const sqd_model* m, const sqd_policy* policy, long replications, uint64_t seed, long cap,
                        char** out_json, char** out_runs_csv) {
    return guarded([&] {
        need(m, "model");
        need(policy, "policy");
        need(out_json, "out_json");
        if (m->sensing) throw sqd::Error(sqd::Errc::unsupported, "simulation covers the social-learning model");
        const auto& d = m->m;
        sqd::Policy p;
        switch (policy->kind) {
            case SQD_POLICY_GRID:
                need(policy->solution, "policy solution");
                if (policy->solution->sol.grid.X != d.X)
                    throw sqd::Error(sqd::Errc::invalid_argument, "solution grid does not match the model");
                p = sqd::grid_policy(policy->solution->sol);
                break;
            case SQD_POLICY_MYOPIC: p = sqd::myopic_policy(d); break;
            case SQD_POLICY_LINEAR: {
                need(policy->theta, "theta");
                if (policy->theta_len != static_cast<size_t>(d.X - 1))
                    throw sqd::Error(sqd::Errc::invalid_argument, "theta must have X-1 entries");
                p = sqd::threshold_policy({sqd::Vec(policy->theta, policy->theta + policy->theta_len)});
                break;
            }
            case SQD_POLICY_STOP: p = sqd::constant_policy(1); break;
            case SQD_POLICY_CONTINUE: p = sqd::constant_policy(2); break;
            default: throw sqd::Error(sqd::Errc::invalid_argument, "unknown policy kind");
        }
        sqd::SimOptions so;
        if (cap > 0) so.cap = cap;
        sqd::SimReport r = sqd::monte_carlo(d, p, replications, seed, so);
        put(out_json, sim_json(r).dump(2));
        if (out_runs_csv) {
            std::ostringstream os;
            os << "replication,tau,tau0,delay,false_alarm,cost\n";
            for (std::size_t i = 0; i < r.runs.size(); ++i) {
                const auto& run = r.runs[i];
                os << i << "," << run.tau << "," << run.tau0 << "," << run.delay << "," << (run.false_alarm ? 1 : 0)
                   << "," << num(run.cost) << "\n";
            }
            put(out_runs_csv, os.str());
        }
    });
}

sqd_status sqd_reproduce(const char* name, int grid, int horizon, int* ok, char** out_json,
                         sqd_solution** out_solution) {
    return guarded([&] {
        need(name, "name");
        sqd::ReproResult r = sqd::reproduce(name, grid, horizon);
        const sqd::ExperimentPreset& p = sqd::find_preset(name);
        if (ok) *ok = r.ok() ? 1 : 0;
        json checks = json::array();
        for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
        json j = summary_of(r.solution, p.model);
        j["preset"] = name;
        j["expected"] = p.expected;
        j["checks"] = checks;
        j["ok"] = r.ok();
        put(out_json, j.dump(2));
        if (out_solution) {
            auto h = std::make_unique<sqd_solution>();
            h->sol = std::move(r.solution);
            h->model = p.model;
            *out_solution = h.release();
        }
    });
}

}  // extern "C"
