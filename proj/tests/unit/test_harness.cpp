#include <doctest.h>

#include "ttubs/fixtures.hpp"
#include "ttubs/harness.hpp"

#include <atomic>
#include <set>
#include <sstream>

using namespace ttubs;

namespace {

Scenario one_link(const std::vector<std::pair<Nanos, std::int64_t>>& period_and_payload)
{
    Scenario sc;
    sc.nodes = {{"A", NodeKind::EndStation}, {"B", NodeKind::EndStation}};
    sc.links = {Link{0, 1}};
    int i = 0;
    for (auto [t, p] : period_and_payload) {
        sc.streams.push_back(Stream{"s" + std::to_string(i++), t, p, p, 4, t, 0, {0}, 0});
    }
    return sc;
}

} // namespace

TEST_CASE("chain generator")
{
    ChainSpec spec;
    spec.switches = 1;
    spec.streams = 5;
    spec.seed = 11;
    const Scenario a = gen_chain(spec);
    CHECK(device_count(a) == 4);
    CHECK(a.streams.size() == 5);
    CHECK(validate_scenario(a).empty());
    const Scenario again = gen_chain(spec);
    CHECK(again.streams.size() == a.streams.size());
    for (std::size_t i = 0; i < a.streams.size(); ++i) {
        CHECK(a.streams[i].route == again.streams[i].route);
        CHECK(a.streams[i].payload_max == again.streams[i].payload_max);
    }

    spec.switches = 10;
    spec.streams = 95;
    const Scenario big = gen_chain(spec);
    CHECK(device_count(big) == 40);
    CHECK(big.links.size() == 2 * (30 + 9));
    const std::set<std::int64_t> sizes{400, 600, 800, 1000, 1500};
    for (StreamIndex s = 0; s < big.streams.size(); ++s) {
        const Stream& st = big.streams[s];
        CHECK(sizes.count(st.payload_max) == 1);
        CHECK(st.payload_min == st.payload_max);
        CHECK((st.period == 10 * kNsPerMs || st.period == 20 * kNsPerMs));
        CHECK(st.e2e_deadline == st.period);
        CHECK(st.jitter_req == st.period / 10);
        const NodeIndex t = big.talker(s);
        const NodeIndex l = big.listener(s);
        CHECK(t != l);
        CHECK_FALSE(big.is_switch(t));
        CHECK_FALSE(big.is_switch(l));
        // station ES<i>_<j> hangs off SW<i>
        auto sw_of = [&](NodeIndex n) { return std::stoi(big.nodes[n].id.substr(2)); };
        CHECK(st.route.size() == static_cast<std::size_t>(std::abs(sw_of(t) - sw_of(l)) + 2));
    }

    spec.switches = 1;
    spec.streams = 0;
    const Scenario empty = gen_chain(spec);
    CHECK(empty.streams.empty());
    CHECK(census(empty, Mode::WA).total() == 0);

    spec.stations_per_switch = 1;
    spec.streams = 1;
    CHECK_THROWS_AS(gen_chain(spec), InvalidInput);
}

TEST_CASE("census study means")
{
    CensusPlan plan;
    plan.switches = {1};
    plan.streams = {0, 5};
    plan.repetitions = 50;
    plan.jobs = 2;
    const auto cells = run_census_study(plan);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].mean_total_wa == 0.0);
    CHECK(cells[1].devices == 4);
    CHECK(cells[1].mean_total_wa >= 10.0);
    CHECK(cells[1].mean_total_wa <= 99.0);
    CHECK(cells[1].mean_total_nfic == doctest::Approx(cells[1].mean_total_wa - cells[1].mean[4]));

    plan.jobs = 1;
    const auto serial = run_census_study(plan);
    CHECK(serial[1].mean_total_wa == cells[1].mean_total_wa);

    std::ostringstream os;
    write_census_study_csv(os, cells);
    CHECK(os.str().starts_with("devices,streams,repetitions,frame,link,flow,e2e,isolation,total_wa,total_nfic\n"));
    plan.repetitions = 0;
    CHECK_THROWS_AS(run_census_study(plan), InvalidInput);
}

TEST_CASE("exhaustive search")
{
    // 978 B payload: 8 us on the wire
    const Scenario tight = one_link({{20'000, 978}, {20'000, 978}, {20'000, 978}});
    CHECK_FALSE(exhaustive_schedule(tight, Mode::NFIC).has_value());
    const Scenario fits = one_link({{20'000, 978}, {20'000, 978}});
    const auto s = exhaustive_schedule(fits, Mode::NFIC);
    REQUIRE(s.has_value());
    CHECK(validate_schedule(fits, *s, Mode::NFIC).empty());
    CHECK(s->at(0, 0, 0) == 0);
    CHECK(s->at(1, 0, 0) == 8'000);

    const Scenario adas = fixtures::adas_scenario();
    Scenario cams = adas;
    cams.streams.resize(2);
    const auto c = exhaustive_schedule(cams, Mode::NFIC, 4 * kNsPerUs);
    REQUIRE(c.has_value());
    CHECK(validate_schedule(cams, *c, Mode::NFIC).empty());
}

TEST_CASE("random small scenarios agree with the exhaustive oracle")
{
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Scenario sc = random_small_scenario(seed);
        CAPTURE(sc.name);
        REQUIRE(validate_scenario(sc).empty());
        CHECK(sc.streams.size() <= 10);
        CHECK(device_count(sc) <= 12);
        if (expand_frame_instances(sc).size() > 6) {
            continue;
        }
        const auto r = lstb_solve(sc, Mode::NFIC);
        const auto brute = exhaustive_schedule(sc, Mode::NFIC);
        if (r.status == LstbStatus::Sat) {
            CHECK(brute.has_value());
        } else if (r.status == LstbStatus::Infeasible) {
            CHECK_FALSE(brute.has_value());
        }
        ++checked;
    }
    CHECK(checked > 5);
}

TEST_CASE("parallel_for covers every index and rethrows")
{
    std::vector<std::atomic<int>> hits(50);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) {
        CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) {
                                         throw InvalidInput("boom");
                                     }
                                 }),
                    InvalidInput);
}

TEST_CASE("solver study on a small batch")
{
    SolverPlan plan;
    plan.switches = {1};
    plan.streams = {4};
    plan.repetitions = 2;
    plan.timeout_s = 60;
    const auto runs = run_solver_study(plan);
    REQUIRE(runs.size() == 2 * 4);
    for (const auto& r : runs) {
        CAPTURE(r.solver);
        CHECK(r.status == "sat");
        CHECK(r.valid);
        CHECK(r.devices == 4);
    }
    CHECK(runs[0].census_total < runs[2].census_total);

    std::stringstream ss;
    write_solver_study_csv(ss, runs);
    const auto back = read_solver_study_csv(ss);
    REQUIRE(back.size() == runs.size());
    CHECK(back[3].solver == runs[3].solver);
    CHECK(back[3].mode == runs[3].mode);
    CHECK(back[3].census_total == runs[3].census_total);

    const auto summary = summarize_solver_runs(runs);
    REQUIRE(summary.size() == 4);
    for (const auto& s : summary) {
        CHECK(s.runs == 2);
        CHECK(s.sat == 2);
    }
    std::istringstream bad("header\nx,1\n");
    CHECK_THROWS_AS(read_solver_study_csv(bad), InvalidInput);

    SolverPlan missing = plan;
    missing.solver_command = "/nonexistent/solver";
    CHECK_THROWS_AS(run_solver_study(missing), SolverError);
}

TEST_CASE("fixture replay")
{
    const auto t3 = replay_fixture(Fixture::Table3, EgressMode::TtUbs, {}, 1, 4 * kNsPerMs);
    CHECK(t3.violations.empty());
    CHECK(t3.requirements_met);
    CHECK_FALSE(t3.partial);

    const auto t7 = replay_fixture(Fixture::Table7, EgressMode::TtUbs, {}, 1, 4 * kNsPerMs);
    CHECK(t7.partial);
    CHECK(t7.requirements_met);

    const auto t6 = replay_fixture(Fixture::Table6Gcl, EgressMode::Tas, {}, 1, 4 * kNsPerMs);
    CHECK(t6.validated_in == Mode::WA);
    CHECK(t6.violations.empty());
    CHECK(t6.requirements_met);

    const Scenario sc = fixtures::adas_scenario();
    const auto tas = replay_fixture(Fixture::Table3, EgressMode::Tas, {fixtures::delay_attack(sc, 10'000)}, 1,
                                    4 * kNsPerMs);
    CHECK_FALSE(tas.requirements_met);

    const auto t8 = replay_fixture(Fixture::Table8, EgressMode::TtUbs, {fixtures::delay_attack(sc, 221'000)}, 1,
                                   4 * kNsPerMs);
    CHECK(t8.requirements_met);
    CHECK(t8.report.discards.size() >= 2);

    CHECK(parse_fixture("table6-gcl") == Fixture::Table6Gcl);
    CHECK_THROWS_AS(parse_fixture("table9"), InvalidInput);

    const auto rows = run_replay_matrix(Fixture::Table3, 1, 2 * kNsPerMs, 2);
    CHECK(rows.size() == 4 * 2 * 4);
    std::ostringstream os;
    write_replay_matrix_csv(os, rows);
    CHECK(os.str().find("\nnormal,tas,cam1,") != std::string::npos);
}
