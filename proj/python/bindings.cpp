#include "ttubs/artifacts.hpp"
#include "ttubs/constraints.hpp"
#include "ttubs/fixtures.hpp"
#include "ttubs/harness.hpp"
#include "ttubs/lstb.hpp"
#include "ttubs/scenario_io.hpp"
#include "ttubs/simulator.hpp"
#include "ttubs/smt_solver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cctype>
#include <sstream>

namespace py = pybind11;
using namespace ttubs;

namespace {

py::object optional_ns(const std::optional<Nanos>& v)
{
    return v ? py::cast(*v) : py::none();
}

py::dict census_dict(const ConstraintCensus& c)
{
    py::dict d;
    for (std::size_t k = 0; k < kCategoryCount; ++k) {
        std::string key(to_string(static_cast<Category>(k)));
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
        d[py::str(key)] = c.counts[k];
    }
    d["total"] = c.total();
    return d;
}

py::dict metrics_dict(const StreamMetrics& m)
{
    py::dict d;
    d["stream"] = m.stream;
    d["sent"] = m.sent;
    d["delivered"] = m.delivered;
    d["attack_dropped"] = m.attack_dropped;
    d["timeout_discarded"] = m.timeout_discarded;
    d["displaced"] = m.displaced;
    d["pending"] = m.pending;
    d["e2e_max_ns"] = optional_ns(m.e2e_max);
    d["e2e_min_ns"] = optional_ns(m.e2e_min);
    d["jitter_ns"] = optional_ns(m.jitter);
    d["deadline_violations"] = m.deadline_violations;
    d["meets_requirements"] = m.meets_requirements();
    return d;
}

Schedule fixture_schedule(const Scenario& adas, const std::string& name)
{
    switch (parse_fixture(name)) {
    case Fixture::Table3:
        return fixtures::table3_schedule(adas);
    case Fixture::Table6Gcl:
        return fixtures::table6_schedule(adas);
    case Fixture::Table7:
        return fixtures::table7_schedule(adas);
    case Fixture::Table8:
        return fixtures::table8_schedule(adas);
    }
    throw InvalidInput("unknown fixture " + name);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<InvalidSchedule>(m, "InvalidSchedule", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("adas_scenario", [] { return scenario_to_json(fixtures::adas_scenario()); });
    m.def("fixture_schedule",
          [](const std::string& name) {
              const Scenario sc = fixtures::adas_scenario();
              return schedule_to_json(sc, fixture_schedule(sc, name));
          },
          py::arg("name"));
    m.def("gen_chain",
          [](int switches, int streams, std::uint64_t seed, int stations_per_switch) {
              ChainSpec spec;
              spec.switches = switches;
              spec.streams = streams;
              spec.seed = seed;
              spec.stations_per_switch = stations_per_switch;
              return scenario_to_json(gen_chain(spec));
          },
          py::arg("switches"), py::arg("streams"), py::arg("seed") = 1, py::arg("stations_per_switch") = 3);

    m.def("bytes_to_duration", &bytes_to_duration, py::arg("payload"), py::arg("rate_bps"));

    m.def("census",
          [](const std::string& scenario, const std::string& mode) {
              return census_dict(census(parse_scenario_json(scenario), parse_mode(mode)));
          },
          py::arg("scenario"), py::arg("mode") = "nfic");

    m.def("validate",
          [](const std::string& scenario, const std::string& schedule, const std::string& mode) {
              const Scenario sc = parse_scenario_json(scenario);
              std::vector<std::string> out;
              for (const auto& v : validate_schedule(sc, parse_schedule_json(sc, schedule), parse_mode(mode))) {
                  out.push_back(v.constraint.label);
              }
              return out;
          },
          py::arg("scenario"), py::arg("schedule"), py::arg("mode") = "nfic");

    m.def("lstb_solve",
          [](const std::string& scenario, const std::string& mode) {
              const Scenario sc = parse_scenario_json(scenario);
              const LstbResult r = lstb_solve(sc, parse_mode(mode));
              py::dict d;
              d["status"] = std::string(to_string(r.status));
              d["schedule"] = r.schedule ? py::cast(schedule_to_json(sc, *r.schedule)) : py::none();
              d["backjumps"] = r.stats.backjumps;
              d["seconds"] = r.stats.seconds;
              return d;
          },
          py::arg("scenario"), py::arg("mode") = "nfic");

    m.def("smt_solve",
          [](const std::string& scenario, const std::string& mode, double timeout_s, const std::string& command) {
              const Scenario sc = parse_scenario_json(scenario);
              SolveOutcome o;
              {
                  py::gil_scoped_release release;
                  o = solve(SolveRequest{sc, parse_mode(mode), timeout_s, command});
              }
              py::dict d;
              d["status"] = std::string(to_string(o.status));
              d["schedule"] = o.schedule ? py::cast(schedule_to_json(sc, *o.schedule)) : py::none();
              d["seconds"] = o.solve_time_s;
              return d;
          },
          py::arg("scenario"), py::arg("mode") = "nfic", py::arg("timeout_s") = 300.0, py::arg("command") = "");

    m.def("shaper_table_csv",
          [](const std::string& scenario, const std::string& schedule) {
              const Scenario sc = parse_scenario_json(scenario);
              std::ostringstream os;
              write_shaper_table_csv(os, sc, build_shaper_offset_table(sc, parse_schedule_json(sc, schedule)));
              return os.str();
          },
          py::arg("scenario"), py::arg("schedule"));

    m.def("e2e_bounds",
          [](const std::string& scenario, const std::string& schedule) {
              const Scenario sc = parse_scenario_json(scenario);
              const auto table = build_shaper_offset_table(sc, parse_schedule_json(sc, schedule));
              py::dict d;
              for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
                  const E2EBounds b = e2e_bounds_and_jitter(sc, table, s);
                  d[py::str(sc.streams[s].id)] = py::make_tuple(b.max, b.min, b.jitter);
              }
              return d;
          },
          py::arg("scenario"), py::arg("schedule"));

    m.def("simulate",
          [](const std::string& scenario, const std::string& schedule, const std::string& egress,
             std::uint64_t seed, const std::string& duration, const std::vector<std::string>& attacks) {
              const Scenario sc = parse_scenario_json(scenario);
              SimConfig c = make_sim_config(sc, parse_schedule_json(sc, schedule), parse_egress_mode(egress));
              c.seed = seed;
              c.duration = parse_duration(duration);
              for (const auto& a : attacks) {
                  c.faults.push_back(parse_attack(sc, a));
              }
              SimReport r;
              {
                  py::gil_scoped_release release;
                  r = run_simulation(c);
              }
              py::list metrics;
              for (const auto& m : r.metrics) {
                  metrics.append(metrics_dict(m));
              }
              py::dict d;
              d["metrics"] = metrics;
              d["discards"] = static_cast<std::int64_t>(r.discards.size());
              d["trace_hash"] = r.trace_hash;
              d["trace_rows"] = r.trace_rows;
              return d;
          },
          py::arg("scenario"), py::arg("schedule"), py::arg("egress") = "ttubs", py::arg("seed") = 1,
          py::arg("duration") = "10s", py::arg("attacks") = std::vector<std::string>{});
}
