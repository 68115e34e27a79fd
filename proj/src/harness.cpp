#include "ttubs/harness.hpp"

#include "ttubs/fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

namespace ttubs {

namespace {

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t h = mix(base);
    for (auto p : parts) {
        h = mix(h ^ p);
    }
    return h;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v)
{
    std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
    return v[d(rng)];
}

double median(std::vector<double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

} // namespace

Scenario gen_chain(const ChainSpec& spec)
{
    if (spec.switches < 1 || spec.stations_per_switch < 1 || spec.streams < 0 || spec.periods.empty() ||
        spec.sizes.empty()) {
        throw InvalidInput("chain needs at least one switch, one station per switch, periods and sizes");
    }
    const int stations = spec.switches * spec.stations_per_switch;
    if (spec.streams > 0 && stations < 2) {
        throw InvalidInput("chain needs two stations to carry streams");
    }
    Scenario sc;
    sc.name = "chain-" + std::to_string(spec.switches) + "x" + std::to_string(spec.streams) + "-s" +
              std::to_string(spec.seed);
    std::vector<std::string> station_ids;
    std::vector<int> station_switch;
    for (int i = 0; i < spec.switches; ++i) {
        sc.nodes.push_back({"SW" + std::to_string(i + 1), NodeKind::Switch});
        for (int j = 0; j < spec.stations_per_switch; ++j) {
            station_ids.push_back("ES" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
            station_switch.push_back(i);
            sc.nodes.push_back({station_ids.back(), NodeKind::EndStation});
        }
    }
    auto duplex = [&](const std::string& a, const std::string& b) {
        Link l;
        l.src = *sc.find_node(a);
        l.dst = *sc.find_node(b);
        l.rate_bps = spec.rate_bps;
        sc.links.push_back(l);
        std::swap(l.src, l.dst);
        sc.links.push_back(l);
    };
    for (std::size_t k = 0; k < station_ids.size(); ++k) {
        duplex(station_ids[k], "SW" + std::to_string(station_switch[k] + 1));
    }
    for (int i = 0; i + 1 < spec.switches; ++i) {
        duplex("SW" + std::to_string(i + 1), "SW" + std::to_string(i + 2));
    }

    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<int> station(0, stations - 1);
    std::uniform_int_distribution<int> other(0, stations - 2);
    for (int n = 0; n < spec.streams; ++n) {
        const int t = station(rng);
        int l = other(rng);
        if (l >= t) {
            ++l;
        }
        Stream st;
        st.id = "s" + std::to_string(n);
        st.period = pick(rng, spec.periods);
        const std::int64_t size = pick(rng, spec.sizes);
        st.payload_min = size;
        st.payload_max = size;
        st.queue = kTtQueue;
        st.e2e_deadline = st.period;
        st.jitter_req = st.period / 10;
        std::vector<std::string> path{station_ids[static_cast<std::size_t>(t)]};
        const int a = station_switch[static_cast<std::size_t>(t)];
        const int b = station_switch[static_cast<std::size_t>(l)];
        const int dir = a <= b ? 1 : -1;
        for (int i = a;; i += dir) {
            path.push_back("SW" + std::to_string(i + 1));
            if (i == b) {
                break;
            }
        }
        path.push_back(station_ids[static_cast<std::size_t>(l)]);
        sc.add_stream_by_path(std::move(st), path);
    }
    return sc;
}

std::int64_t device_count(const Scenario& sc)
{
    return static_cast<std::int64_t>(sc.nodes.size());
}

Scenario random_small_scenario(std::uint64_t seed)
{
    std::mt19937_64 rng(mix(seed));
    ChainSpec spec;
    spec.switches = std::uniform_int_distribution<int>(1, 3)(rng);
    spec.stations_per_switch = std::uniform_int_distribution<int>(2, 3)(rng);
    spec.streams = std::uniform_int_distribution<int>(1, 10)(rng);
    spec.periods = {20 * kNsPerUs, 40 * kNsPerUs};
    // wire times of 1, 4, 8 and 12 us at 1 Gb/s
    spec.sizes = {103, 478, 978, 1478};
    spec.seed = rng();
    Scenario sc = gen_chain(spec);
    sc.name = "small-" + std::to_string(seed);
    return sc;
}

std::optional<Schedule> exhaustive_schedule(const Scenario& sc, Mode mode, Nanos step)
{
    require_valid(sc);
    const ConstraintSet cs = build_constraint_set(sc, mode);
    const std::size_t n = cs.variables.size();
    std::vector<std::vector<const GroundConstraint*>> due(n);
    for (const auto& c : cs.constraints) {
        std::size_t last = 0;
        for (const auto& a : c.atoms) {
            for (const auto& t : a.terms) {
                last = std::max(last, t.var);
            }
        }
        if (n > 0) {
            due[last].push_back(&c);
        }
    }
    std::vector<std::int64_t> lo(n);
    std::vector<std::int64_t> hi(n);
    std::vector<std::int64_t> inc(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Variable& v = cs.variables[i];
        if (v.kind == VarKind::Offset) {
            lo[i] = 0;
            hi[i] = sc.streams[v.stream].period;
            inc[i] = step;
        } else {
            lo[i] = v.lo;
            hi[i] = v.hi;
            inc[i] = 1;
        }
    }
    std::vector<std::int64_t> values(n, 0);
    const std::function<bool(std::size_t)> dfs = [&](std::size_t i) {
        if (i == n) {
            return true;
        }
        for (std::int64_t x = lo[i]; x <= hi[i]; x += inc[i]) {
            values[i] = x;
            const bool ok = std::all_of(due[i].begin(), due[i].end(),
                                        [&](const GroundConstraint* c) { return holds(*c, values); });
            if (ok && dfs(i + 1)) {
                return true;
            }
        }
        return false;
    };
    if (!dfs(0)) {
        return std::nullopt;
    }
    std::map<std::string, std::int64_t> model;
    for (std::size_t i = 0; i < n; ++i) {
        model[cs.variables[i].name] = values[i];
    }
    return schedule_from_model(sc, cs, model);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn)
{
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::vector<CensusCell> run_census_study(const CensusPlan& plan)
{
    if (plan.repetitions < 1) {
        throw InvalidInput("census study needs at least one repetition");
    }
    std::vector<std::pair<int, int>> keys;
    for (int sw : plan.switches) {
        for (int st : plan.streams) {
            keys.emplace_back(sw, st);
        }
    }
    std::vector<CensusCell> cells(keys.size());
    parallel_for(keys.size(), plan.jobs, [&](std::size_t i) {
        const auto [sw, st] = keys[i];
        CensusCell cell;
        cell.streams = st;
        cell.repetitions = plan.repetitions;
        for (int r = 0; r < plan.repetitions; ++r) {
            ChainSpec spec;
            spec.switches = sw;
            spec.streams = st;
            spec.seed = derive_seed(plan.seed, {static_cast<std::uint64_t>(sw), static_cast<std::uint64_t>(st),
                                                static_cast<std::uint64_t>(r)});
            const Scenario sc = gen_chain(spec);
            cell.devices = device_count(sc);
            const ConstraintCensus c = census(sc, Mode::WA);
            for (std::size_t k = 0; k < kCategoryCount; ++k) {
                cell.mean[k] += static_cast<double>(c.counts[k]);
            }
        }
        double total = 0.0;
        for (auto& m : cell.mean) {
            m /= plan.repetitions;
            total += m;
        }
        cell.mean_total_wa = total;
        cell.mean_total_nfic = total - cell.mean[static_cast<std::size_t>(Category::FrameIsolation)];
        cells[i] = cell;
    });
    return cells;
}

void write_census_study_csv(std::ostream& os, const std::vector<CensusCell>& cells)
{
    os << "devices,streams,repetitions,frame,link,flow,e2e,isolation,total_wa,total_nfic\n";
    char buf[256];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%lld,%d,%d,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f\n",
                      static_cast<long long>(c.devices), c.streams, c.repetitions, c.mean[0], c.mean[1], c.mean[2],
                      c.mean[3], c.mean[4], c.mean_total_wa, c.mean_total_nfic);
        os << buf;
    }
}

void ensure_solver_available(const std::string& command)
{
    Scenario probe;
    probe.name = "probe";
    probe.nodes = {{"A", NodeKind::EndStation}, {"B", NodeKind::EndStation}};
    probe.links = {Link{0, 1}};
    probe.streams = {Stream{"s", kNsPerMs, 100, 100, kTtQueue, kNsPerMs, 0, {0}, 0}};
    const SolveOutcome o = solve(SolveRequest{probe, Mode::NFIC, 30.0, command});
    if (o.status != SolveStatus::Sat) {
        throw SolverError("solver '" + resolve_solver_command(command) + "' failed a trivial satisfiable probe");
    }
}

std::vector<SolverRun> run_solver_study(const SolverPlan& plan)
{
    if (plan.repetitions < 1) {
        throw InvalidInput("solver study needs at least one repetition");
    }
    if (plan.run_smt) {
        ensure_solver_available(plan.solver_command);
    }
    struct Unit {
        int switches;
        int streams;
        int rep;
    };
    std::vector<Unit> units;
    for (int sw : plan.switches) {
        for (int st : plan.streams) {
            for (int r = 0; r < plan.repetitions; ++r) {
                units.push_back({sw, st, r});
            }
        }
    }
    std::vector<std::vector<SolverRun>> results(units.size());
    parallel_for(units.size(), plan.jobs, [&](std::size_t i) {
        const Unit u = units[i];
        ChainSpec spec;
        spec.switches = u.switches;
        spec.streams = u.streams;
        spec.seed = derive_seed(plan.seed, {static_cast<std::uint64_t>(u.switches),
                                            static_cast<std::uint64_t>(u.streams), static_cast<std::uint64_t>(u.rep)});
        const Scenario sc = gen_chain(spec);
        SolverRun base;
        base.scenario = sc.name;
        base.devices = device_count(sc);
        base.streams = u.streams;
        base.repetition = u.rep;
        for (Mode m : {Mode::NFIC, Mode::WA}) {
            const std::int64_t total = census(sc, m).total();
            if (plan.run_smt) {
                SolverRun run = base;
                run.solver = "smt";
                run.mode = m;
                run.census_total = total;
                try {
                    const SolveOutcome o = solve(SolveRequest{sc, m, plan.timeout_s, plan.solver_command});
                    run.status = std::string(to_string(o.status));
                    run.seconds = o.solve_time_s;
                    run.valid = o.schedule && validate_schedule(sc, *o.schedule, m).empty();
                } catch (const SolverError& e) {
                    run.status = "error";
                }
                results[i].push_back(run);
            }
            if (plan.run_lstb) {
                SolverRun run = base;
                run.solver = "lstb";
                run.mode = m;
                run.census_total = total;
                LstbLimits limits = plan.lstb_limits;
                limits.max_seconds = std::min(limits.max_seconds, plan.timeout_s);
                const LstbResult r = lstb_solve(sc, m, limits);
                run.status = std::string(to_string(r.status));
                run.seconds = r.stats.seconds;
                run.backjumps = r.stats.backjumps;
                run.valid = r.schedule && validate_schedule(sc, *r.schedule, m).empty();
                results[i].push_back(run);
            }
        }
    });
    std::vector<SolverRun> out;
    for (auto& v : results) {
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

void write_solver_study_csv(std::ostream& os, const std::vector<SolverRun>& runs)
{
    os << "scenario,devices,streams,repetition,solver,mode,status,seconds,backjumps,census_total,valid\n";
    char secs[32];
    for (const auto& r : runs) {
        std::snprintf(secs, sizeof secs, "%.6f", r.seconds);
        os << r.scenario << ',' << r.devices << ',' << r.streams << ',' << r.repetition << ',' << r.solver << ','
           << to_string(r.mode) << ',' << r.status << ',' << secs << ',' << r.backjumps << ',' << r.census_total
           << ',' << (r.valid ? 1 : 0) << '\n';
    }
}

std::vector<SolverRun> read_solver_study_csv(std::istream& is)
{
    std::vector<SolverRun> out;
    std::string line;
    if (!std::getline(is, line)) {
        return out;
    }
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 11) {
            throw InvalidInput("solver study row " + std::to_string(row) + " has " + std::to_string(f.size()) +
                               " fields");
        }
        try {
            SolverRun r;
            r.scenario = f[0];
            r.devices = std::stoll(f[1]);
            r.streams = std::stoi(f[2]);
            r.repetition = std::stoi(f[3]);
            r.solver = f[4];
            r.mode = parse_mode(f[5]);
            r.status = f[6];
            r.seconds = std::stod(f[7]);
            r.backjumps = std::stoll(f[8]);
            r.census_total = std::stoll(f[9]);
            r.valid = f[10] == "1";
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw InvalidInput("solver study row " + std::to_string(row) + " is malformed");
        }
    }
    return out;
}

std::vector<SolverSummary> summarize_solver_runs(const std::vector<SolverRun>& runs)
{
    using Key = std::tuple<std::string, int, std::int64_t, int>;
    std::map<Key, std::vector<const SolverRun*>> groups;
    for (const auto& r : runs) {
        groups[{r.solver, static_cast<int>(r.mode), r.devices, r.streams}].push_back(&r);
    }
    std::vector<SolverSummary> out;
    for (const auto& [key, members] : groups) {
        SolverSummary s;
        s.solver = std::get<0>(key);
        s.mode = static_cast<Mode>(std::get<1>(key));
        s.devices = std::get<2>(key);
        s.streams = std::get<3>(key);
        std::vector<double> secs;
        std::vector<double> jumps;
        for (const SolverRun* r : members) {
            ++s.runs;
            s.sat += r->status == "sat" ? 1 : 0;
            secs.push_back(r->seconds);
            jumps.push_back(static_cast<double>(r->backjumps));
        }
        s.median_seconds = median(secs);
        s.median_backjumps = median(jumps);
        out.push_back(s);
    }
    return out;
}

void write_solver_summary_csv(std::ostream& os, const std::vector<SolverSummary>& rows)
{
    os << "solver,mode,devices,streams,runs,sat,median_seconds,median_backjumps\n";
    char buf[256];
    for (const auto& s : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%lld,%d,%d,%d,%.6f,%.1f\n", s.solver.c_str(),
                      std::string(to_string(s.mode)).c_str(), static_cast<long long>(s.devices), s.streams, s.runs,
                      s.sat, s.median_seconds, s.median_backjumps);
        os << buf;
    }
}

Fixture parse_fixture(std::string_view name)
{
    if (name == "table3") {
        return Fixture::Table3;
    }
    if (name == "table6-gcl" || name == "table6") {
        return Fixture::Table6Gcl;
    }
    if (name == "table7") {
        return Fixture::Table7;
    }
    if (name == "table8") {
        return Fixture::Table8;
    }
    throw InvalidInput("unknown fixture '" + std::string(name) + "' (table3, table6-gcl, table7, table8)");
}

std::string_view to_string(Fixture f)
{
    switch (f) {
    case Fixture::Table3:
        return "table3";
    case Fixture::Table6Gcl:
        return "table6-gcl";
    case Fixture::Table7:
        return "table7";
    case Fixture::Table8:
        return "table8";
    }
    return "table3";
}

namespace {

Schedule fixture_schedule(Fixture f, const Scenario& sc)
{
    switch (f) {
    case Fixture::Table3:
        return fixtures::table3_schedule(sc);
    case Fixture::Table6Gcl:
        return fixtures::table6_schedule(sc);
    case Fixture::Table7:
        return fixtures::table7_schedule(sc);
    case Fixture::Table8:
        return fixtures::table8_schedule(sc);
    }
    return fixtures::table3_schedule(sc);
}

} // namespace

ReplayResult replay_fixture(Fixture f, EgressMode egress, const std::vector<AttackConfig>& faults,
                            std::uint64_t seed, Nanos duration, std::ostream* trace)
{
    const Scenario sc = fixtures::adas_scenario();
    const Schedule schedule = fixture_schedule(f, sc);
    ReplayResult out;
    out.fixture = f;
    out.partial = f == Fixture::Table7;
    out.validated_in = f == Fixture::Table6Gcl ? Mode::WA : Mode::NFIC;
    out.violations = validate_schedule(sc, schedule, out.validated_in);
    if (!out.violations.empty()) {
        return out;
    }
    SimConfig cfg = make_sim_config(sc, schedule, egress);
    cfg.faults = faults;
    cfg.seed = seed;
    cfg.duration = duration;
    cfg.trace = trace;
    out.report = run_simulation(cfg);
    out.requirements_met = std::all_of(out.report.metrics.begin(), out.report.metrics.end(),
                                       [](const StreamMetrics& m) { return m.meets_requirements(); });
    return out;
}

std::vector<ReplayRow> run_replay_matrix(Fixture f, std::uint64_t seed, Nanos duration, int jobs)
{
    const Scenario sc = fixtures::adas_scenario();
    const std::vector<std::pair<std::string, std::vector<AttackConfig>>> cases{
        {"normal", {}},
        {"loss", {fixtures::loss_attack(sc)}},
        {"delay-10us", {fixtures::delay_attack(sc, 10 * kNsPerUs)}},
        {"delay-221us", {fixtures::delay_attack(sc, 221 * kNsPerUs)}},
    };
    const std::vector<EgressMode> modes{EgressMode::Tas, EgressMode::TtUbs};
    std::vector<std::vector<ReplayRow>> parts(cases.size() * modes.size());
    parallel_for(parts.size(), jobs, [&](std::size_t i) {
        const auto& [name, faults] = cases[i / modes.size()];
        const EgressMode egress = modes[i % modes.size()];
        const ReplayResult r = replay_fixture(f, egress, faults, seed, duration);
        for (const auto& m : r.report.metrics) {
            parts[i].push_back(ReplayRow{name, egress, m});
        }
    });
    std::vector<ReplayRow> out;
    for (auto& p : parts) {
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

void write_replay_matrix_csv(std::ostream& os, const std::vector<ReplayRow>& rows)
{
    os << "scenario,egress,stream,sent,delivered,attack_dropped,timeout_discarded,displaced,pending,e2e_max_ns,"
          "e2e_min_ns,jitter_ns,deadline_violations,jitter_violation\n";
    auto opt = [](const std::optional<Nanos>& v) { return v ? std::to_string(*v) : std::string("NA"); };
    for (const auto& r : rows) {
        const StreamMetrics& m = r.metrics;
        os << r.scenario << ',' << to_string(r.egress) << ',' << m.stream << ',' << m.sent << ',' << m.delivered
           << ',' << m.attack_dropped << ',' << m.timeout_discarded << ',' << m.displaced << ',' << m.pending << ','
           << opt(m.e2e_max) << ',' << opt(m.e2e_min) << ',' << opt(m.jitter) << ',' << m.deadline_violations << ','
           << (m.jitter_violation ? 1 : 0) << '\n';
    }
}

} // namespace ttubs
