#include "ttubs/artifacts.hpp"
#include "ttubs/constraints.hpp"
#include "ttubs/fixtures.hpp"
#include "ttubs/harness.hpp"
#include "ttubs/lstb.hpp"
#include "ttubs/scenario_io.hpp"
#include "ttubs/simulator.hpp"
#include "ttubs/smt_solver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace ttubs;

namespace {

Scenario load_named_scenario(const std::string& arg)
{
    if (arg == "adas") {
        return fixtures::adas_scenario();
    }
    return load_scenario(arg);
}

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream os(path);
    if (!os) {
        throw InvalidInput("cannot write " + path.string());
    }
    return os;
}

std::string safe_name(std::string s)
{
    for (char& c : s) {
        if (c == '-' || c == '>') {
            c = '_';
        }
    }
    return s;
}

void write_deployment(const fs::path& dir, const Scenario& sc, const Schedule& schedule)
{
    fs::create_directories(dir);
    write_text_file(dir / "schedule.json", schedule_to_json(sc, schedule));
    const ShaperOffsetTable table = build_shaper_offset_table(sc, schedule);
    auto t = open_out(dir / "shaper_table.csv");
    write_shaper_table_csv(t, sc, table);
    write_text_file(dir / "shaper_table.json", shaper_table_to_json(sc, table));
    for (LinkIndex l = 0; l < sc.links.size(); ++l) {
        if (!sc.is_switch(sc.links[l].src) || sc.streams_on_link(l).empty()) {
            continue;
        }
        auto g = open_out(dir / ("gcl_" + safe_name(sc.link_name(l)) + ".csv"));
        write_gcl_csv(g, build_gcl(sc, schedule, l));
    }
}

void print_metrics(const SimReport& r)
{
    write_metrics_csv(std::cout, r.metrics);
    std::cerr << "events=" << r.events << " trace_rows=" << r.trace_rows << " discards=" << r.discards.size()
              << '\n';
}

std::vector<int> range_list(const std::vector<std::string>& items)
{
    std::vector<int> out;
    for (const auto& item : items) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(std::stoi(item));
            continue;
        }
        const int a = std::stoi(item.substr(0, dots));
        std::string rest = item.substr(dots + 2);
        int step = 1;
        if (const auto colon = rest.find(':'); colon != std::string::npos) {
            step = std::stoi(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        const int b = std::stoi(rest);
        if (step <= 0) {
            throw InvalidInput("range step must be positive in '" + item + "'");
        }
        for (int v = a; v <= b; v += step) {
            out.push_back(v);
        }
    }
    return out;
}

int default_jobs()
{
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"TSN time-triggered scheduling toolkit"};
    app.require_subcommand(1);

    std::string scenario_arg = "adas";
    std::string mode_arg = "nfic";
    std::string solver_cmd;
    double timeout_s = 300.0;
    std::uint64_t seed = 1;
    std::string egress_arg = "ttubs";
    std::vector<std::string> attacks;
    std::string out;
    std::string duration_arg = "10s";
    std::string trace_path;
    bool full_scale = false;
    int jobs = default_jobs();

    auto* gen = app.add_subcommand("gen-chain", "Generate a chained-switch scenario as JSON");
    ChainSpec chain;
    gen->add_option("--switches", chain.switches, "Number of switches (1-10)")->check(CLI::Range(1, 10));
    gen->add_option("--stations", chain.stations_per_switch, "End stations per switch");
    gen->add_option("--streams", chain.streams, "Number of streams");
    gen->add_option("--seed", chain.seed, "Random seed");
    gen->add_option("--out", out, "Output file (stdout if omitted)");

    auto* cen = app.add_subcommand("census", "Count constraints per category");
    cen->add_option("scenario", scenario_arg, "Scenario JSON or 'adas'");
    cen->add_option("--mode", mode_arg, "wa or nfic");

    auto* sol = app.add_subcommand("solve", "Solve a scenario and write deployment artifacts");
    std::string solver_kind = "smt";
    sol->add_option("scenario", scenario_arg, "Scenario JSON or 'adas'");
    sol->add_option("--solver", solver_kind, "smt or lstb")->check(CLI::IsMember({"smt", "lstb"}));
    sol->add_option("--mode", mode_arg, "wa or nfic");
    sol->add_option("--solver-cmd", solver_cmd, "SMT solver command line");
    sol->add_option("--timeout-s", timeout_s, "Solver time limit in seconds");
    sol->add_option("--out", out, "Directory for schedule.json, shaper table and gate lists");

    auto* sim = app.add_subcommand("simulate", "Simulate a scenario with a schedule");
    std::string schedule_path;
    sim->add_option("scenario", scenario_arg, "Scenario JSON or 'adas'");
    sim->add_option("--schedule", schedule_path, "Schedule JSON")->required();
    sim->add_option("--egress", egress_arg, "tas or ttubs");
    sim->add_option("--attack", attacks, "type,SWITCH:FROM[/STREAM],start,count[,delay]");
    sim->add_option("--seed", seed, "Payload seed");
    sim->add_option("--duration", duration_arg, "Simulated time, e.g. 10s or 200ms");
    sim->add_option("--trace", trace_path, "Trace CSV path");
    sim->add_option("--out", out, "Directory for metrics.csv");

    auto* rep = app.add_subcommand("replay", "Replay a bundled schedule through the simulator");
    std::string fixture_arg = "table3";
    rep->add_option("fixture", fixture_arg, "table3, table6-gcl, table7 or table8");
    rep->add_option("--egress", egress_arg, "tas or ttubs");
    rep->add_option("--attack", attacks, "type,SWITCH:FROM[/STREAM],start,count[,delay]");
    rep->add_option("--seed", seed, "Payload seed");
    rep->add_option("--duration", duration_arg, "Simulated time");
    rep->add_option("--trace", trace_path, "Trace CSV path");
    rep->add_option("--out", out, "Directory for metrics.csv");

    auto* scs = app.add_subcommand("study-census", "Mean constraint counts over chain sweeps");
    std::vector<std::string> sw_items{"1..10"};
    std::vector<std::string> st_items{"5..95:10"};
    int reps = 0;
    scs->add_option("--switches", sw_items, "Switch counts, e.g. 1..10 or 1 4 10");
    scs->add_option("--streams", st_items, "Stream counts, e.g. 5..95:10");
    scs->add_option("--reps", reps, "Repetitions per cell (default 50)");
    scs->add_flag("--full-scale", full_scale, "500 repetitions per cell");
    scs->add_option("--seed", seed, "Base seed");
    scs->add_option("--jobs", jobs, "Worker threads");
    scs->add_option("--out", out, "Output directory")->required();

    auto* sss = app.add_subcommand("study-solvers", "Solve time and outcome per chain cell");
    std::vector<std::string> sw2{"2..5"};
    std::vector<std::string> st2{"10..50:10"};
    bool no_smt = false;
    bool no_lstb = false;
    sss->add_option("--switches", sw2, "Switch counts");
    sss->add_option("--streams", st2, "Stream counts");
    sss->add_option("--reps", reps, "Repetitions per cell (default 5)");
    sss->add_flag("--full-scale", full_scale, "50 repetitions per cell");
    sss->add_option("--timeout-s", timeout_s, "Per-solve time limit");
    sss->add_option("--solver-cmd", solver_cmd, "SMT solver command line");
    sss->add_flag("--no-smt", no_smt, "Skip the SMT solver");
    sss->add_flag("--no-lstb", no_lstb, "Skip LS-TB");
    sss->add_option("--seed", seed, "Base seed");
    sss->add_option("--jobs", jobs, "Worker threads");
    sss->add_option("--out", out, "Output directory")->required();

    auto* rpt = app.add_subcommand("report", "Aggregate study CSVs and run the replay matrix");
    rpt->add_option("--out", out, "Directory holding study outputs")->required();
    rpt->add_option("--seed", seed, "Payload seed for the replay matrix");
    rpt->add_option("--duration", duration_arg, "Simulated time per replay");
    rpt->add_option("--jobs", jobs, "Worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const std::string json = scenario_to_json(gen_chain(chain));
            if (out.empty()) {
                std::cout << json << '\n';
            } else {
                write_text_file(out, json);
            }
        } else if (cen->parsed()) {
            const Scenario sc = load_named_scenario(scenario_arg);
            write_census_csv_header(std::cout);
            write_census_csv_row(std::cout, sc.name, device_count(sc), static_cast<std::int64_t>(sc.streams.size()),
                                 census(sc, parse_mode(mode_arg)));
        } else if (sol->parsed()) {
            const Scenario sc = load_named_scenario(scenario_arg);
            const Mode mode = parse_mode(mode_arg);
            std::optional<Schedule> schedule;
            if (solver_kind == "smt") {
                const SolveOutcome o = solve(SolveRequest{sc, mode, timeout_s, solver_cmd});
                std::cout << "status=" << to_string(o.status) << " seconds=" << o.solve_time_s
                          << " constraints=" << o.census.total() << '\n';
                schedule = o.schedule;
            } else {
                LstbLimits limits;
                limits.max_seconds = timeout_s;
                const LstbResult r = lstb_solve(sc, mode, limits);
                write_lstb_csv_header(std::cout);
                write_lstb_csv_row(std::cout, sc.name, mode, r);
                schedule = r.schedule;
            }
            if (!schedule) {
                return 2;
            }
            if (out.empty()) {
                std::cout << schedule_to_json(sc, *schedule) << '\n';
            } else {
                write_deployment(out, sc, *schedule);
            }
        } else if (sim->parsed() || rep->parsed()) {
            std::ofstream trace_file;
            if (!trace_path.empty()) {
                trace_file = open_out(trace_path);
            }
            std::ostream* trace = trace_path.empty() ? nullptr : &trace_file;
            const EgressMode egress = parse_egress_mode(egress_arg);
            const Nanos duration = parse_duration(duration_arg);
            SimReport report;
            if (sim->parsed()) {
                const Scenario sc = load_named_scenario(scenario_arg);
                SimConfig cfg = make_sim_config(sc, load_schedule(sc, schedule_path), egress);
                for (const auto& a : attacks) {
                    cfg.faults.push_back(parse_attack(sc, a));
                }
                cfg.seed = seed;
                cfg.duration = duration;
                cfg.trace = trace;
                report = run_simulation(cfg);
            } else {
                const Scenario sc = fixtures::adas_scenario();
                std::vector<AttackConfig> faults;
                for (const auto& a : attacks) {
                    faults.push_back(parse_attack(sc, a));
                }
                const ReplayResult r = replay_fixture(parse_fixture(fixture_arg), egress, faults, seed, duration, trace);
                if (!r.violations.empty()) {
                    std::cerr << "fixture violates " << r.violations.size() << " constraint(s), first: "
                              << r.violations.front().constraint.label << '\n';
                    return 1;
                }
                std::cerr << (r.partial ? "fixture is partial; missing entries filled\n" : "")
                          << "requirements " << (r.requirements_met ? "met" : "violated") << '\n';
                report = r.report;
            }
            print_metrics(report);
            if (!out.empty()) {
                auto m = open_out(fs::path(out) / "metrics.csv");
                write_metrics_csv(m, report.metrics);
                auto d = open_out(fs::path(out) / "discards.csv");
                d << "time_ns,stream,instance,disposition\n";
                for (const auto& e : report.discards) {
                    d << e.time << ',' << e.stream << ',' << e.instance << ',' << to_string(e.disposition) << '\n';
                }
            }
        } else if (scs->parsed()) {
            CensusPlan plan;
            plan.switches = range_list(sw_items);
            plan.streams = range_list(st_items);
            plan.repetitions = reps > 0 ? reps : (full_scale ? 500 : 50);
            plan.seed = seed;
            plan.jobs = jobs;
            const auto cells = run_census_study(plan);
            auto os = open_out(fs::path(out) / "census_study.csv");
            write_census_study_csv(os, cells);
            write_census_study_csv(std::cout, cells);
        } else if (sss->parsed()) {
            SolverPlan plan;
            plan.switches = range_list(sw2);
            plan.streams = range_list(st2);
            plan.repetitions = reps > 0 ? reps : (full_scale ? 50 : 5);
            plan.seed = seed;
            plan.timeout_s = timeout_s;
            plan.solver_command = solver_cmd;
            plan.run_smt = !no_smt;
            plan.run_lstb = !no_lstb;
            plan.jobs = jobs;
            const auto runs = run_solver_study(plan);
            auto os = open_out(fs::path(out) / "solver_runs.csv");
            write_solver_study_csv(os, runs);
            const auto summary = summarize_solver_runs(runs);
            auto ss = open_out(fs::path(out) / "solver_summary.csv");
            write_solver_summary_csv(ss, summary);
            write_solver_summary_csv(std::cout, summary);
        } else if (rpt->parsed()) {
            const fs::path dir(out);
            fs::create_directories(dir);
            if (fs::exists(dir / "census_study.csv")) {
                std::cout << "census study:\n" << read_text_file(dir / "census_study.csv");
            }
            if (fs::exists(dir / "solver_runs.csv")) {
                std::ifstream is(dir / "solver_runs.csv");
                const auto summary = summarize_solver_runs(read_solver_study_csv(is));
                auto ss = open_out(dir / "solver_summary.csv");
                write_solver_summary_csv(ss, summary);
                std::cout << "solver summary:\n";
                write_solver_summary_csv(std::cout, summary);
            }
            const auto rows = run_replay_matrix(Fixture::Table3, seed, parse_duration(duration_arg), jobs);
            auto rm = open_out(dir / "replay_matrix.csv");
            write_replay_matrix_csv(rm, rows);
            std::cout << "replay matrix:\n";
            write_replay_matrix_csv(std::cout, rows);
        }
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
