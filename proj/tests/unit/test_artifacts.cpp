#include <doctest.h>

#include "ttubs/artifacts.hpp"
#include "ttubs/constraints.hpp"
#include "ttubs/fixtures.hpp"
#include "ttubs/lstb.hpp"

#include <algorithm>
#include <sstream>

using namespace ttubs;

namespace {

StreamIndex sid(const Scenario& sc, const char* id)
{
    return *sc.find_stream(id);
}

std::vector<std::pair<Nanos, Nanos>> tt_open(const GateControlList& g, int q)
{
    std::vector<std::pair<Nanos, Nanos>> out;
    for (const auto& iv : g.intervals) {
        if (iv.open[static_cast<std::size_t>(q)]) {
            out.emplace_back(iv.start, iv.end);
        }
    }
    return out;
}

} // namespace

TEST_CASE("shaper offset table rows")
{
    const Scenario sc = fixtures::adas_scenario();
    const auto sw1 = *sc.find_node("SW1");
    const auto to_ch = *sc.find_link("SW1", "CentralHost");

    const auto t3 = build_shaper_offset_table(sc, fixtures::table3_schedule(sc));
    CHECK(t3.rows.size() == 12);
    const ShaperRow& cam1 = t3.at(sid(sc, "cam1"), 2);
    CHECK(cam1.node == sw1);
    CHECK(cam1.egress == to_ch);
    CHECK(cam1.offsets == std::vector<Nanos>{32'000, 132'000});
    CHECK(cam1.cycle == 200'000);
    CHECK(t3.at(sid(sc, "control"), 1).offsets == std::vector<Nanos>{3'000});
    CHECK(t3.at(sid(sc, "cam2"), 0).offsets == std::vector<Nanos>{0, 100'000});
    CHECK_FALSE(t3.at(sid(sc, "cam2"), 0).ingress.has_value());
    CHECK(t3.match(sw1, *sc.find_link("SW2", "SW1"), sid(sc, "radar")) == &t3.at(sid(sc, "radar"), 2));

    const auto t8 = build_shaper_offset_table(sc, fixtures::table8_schedule(sc));
    CHECK(t8.at(sid(sc, "cam2"), 2).offsets == std::vector<Nanos>{30'000, 130'000});

    for (const auto& sched : {fixtures::table3_schedule(sc), fixtures::table6_schedule(sc)}) {
        const auto t = build_shaper_offset_table(sc, sched);
        CHECK(schedule_from_table(sc, t) == sched);
    }
}

TEST_CASE("single stream keeps one offset per cycle")
{
    Scenario sc;
    sc.nodes = {{"A", NodeKind::EndStation}, {"B", NodeKind::EndStation}};
    sc.links = {Link{0, 1}};
    sc.streams = {Stream{"s", 50'000, 100, 100, 4, 50'000, 0, {0}, 0}};
    const auto r = lstb_solve(sc, Mode::NFIC);
    const auto t = build_shaper_offset_table(sc, *r.schedule);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].offsets.size() == 1);
    CHECK(t.rows[0].cycle == 50'000);
    const auto b = e2e_bounds_and_jitter(sc, t, 0);
    CHECK(b.jitter == 0);
    CHECK(b.max == bytes_to_duration(100, 1'000'000'000));
}

TEST_CASE("gate control list for SW2 egress")
{
    const Scenario sc = fixtures::adas_scenario();
    const auto link = *sc.find_link("SW2", "SW1");
    const auto g = build_gcl(sc, fixtures::table3_schedule(sc), link);
    CHECK(g.cycle == 200'000);
    CHECK(g.tt_queues == std::set<int>{4});
    const std::vector<std::pair<Nanos, Nanos>> expect{{3'000, 4'776},     {5'000, 8'376},     {11'000, 20'776},
                                                      {21'000, 30'776},   {111'000, 120'776}, {121'000, 130'776}};
    CHECK(tt_open(g, 4) == expect);

    Nanos cur = 0;
    for (const auto& iv : g.intervals) {
        CHECK(iv.start == cur);
        CHECK(iv.end > iv.start);
        cur = iv.end;
    }
    CHECK(cur == g.cycle);

    const auto at22 = gcl_gate_state(g, 22'000);
    for (int q = 0; q < kGateCount; ++q) {
        CHECK(at22[static_cast<std::size_t>(q)] == (q == 4));
    }
    CHECK(gcl_gate_state(g, g.cycle) == gcl_gate_state(g, 0));
    CHECK(gcl_gate_state(g, g.cycle + 22'000) == at22);
    const auto gap = gcl_gate_state(g, 1'000);
    for (int q = 0; q < kGateCount; ++q) {
        CHECK(gap[static_cast<std::size_t>(q)] == (q != 4));
    }
    CHECK(g.interval_end(200'000 + 21'500) == 200'000 + 30'776);

    std::vector<FrameWindow> expected_windows;
    for (auto [a, b] : expect) {
        expected_windows.push_back({a, b - a, 4});
    }
    CHECK(windows_from_gcl(g) == expected_windows);
}

TEST_CASE("gate control list with isolated queues")
{
    const Scenario sc = fixtures::adas_scenario();
    const auto g = build_gcl(sc, fixtures::table6_schedule(sc), *sc.find_link("SW2", "SW1"));
    CHECK(g.tt_queues == std::set<int>{4, 5, 6, 7});
    CHECK(tt_open(g, 7) == std::vector<std::pair<Nanos, Nanos>>{{3'000, 4'776}});
    CHECK(tt_open(g, 6) == std::vector<std::pair<Nanos, Nanos>>{{5'000, 8'376}});
    const auto head = g.intervals.front();
    CHECK(head.start == 0);
    CHECK(head.end == 3'000);
    for (int q = 0; q < kGateCount; ++q) {
        CHECK(head.open[static_cast<std::size_t>(q)] == (q < 4));
    }
    CHECK(windows_from_gcl(g).size() == 6);
}

TEST_CASE("empty link and overlapping windows")
{
    const Scenario sc = fixtures::adas_scenario();
    const auto g = build_gcl(sc, fixtures::table3_schedule(sc), *sc.find_link("SW1", "SW2"));
    REQUIRE(g.intervals.size() == 1);
    CHECK(g.intervals[0].start == 0);
    CHECK(g.intervals[0].end == g.cycle);
    CHECK_FALSE(g.intervals[0].open[4]);
    CHECK(g.intervals[0].open[0]);

    Schedule bad = fixtures::table3_schedule(sc);
    bad.set(0, 2, 0, 22'000);
    CHECK_THROWS_AS(build_gcl(sc, bad, *sc.find_link("SW1", "CentralHost")), InvalidSchedule);
}

TEST_CASE("closed form latency on the SMT-WA-NFIC table")
{
    const Scenario sc = fixtures::adas_scenario();
    const auto t = build_shaper_offset_table(sc, fixtures::table3_schedule(sc));
    CHECK(e2e_closed_form(sc, t, sid(sc, "cam1"), 0, 1200) == 41'776);
    CHECK(e2e_closed_form(sc, t, sid(sc, "cam1"), 0, 1000) == 40'176);
    CHECK(e2e_closed_form(sc, t, sid(sc, "cam1"), 1, 1200) == 41'776);

    for (const char* cam : {"cam1", "cam2"}) {
        const auto b = e2e_bounds_and_jitter(sc, t, sid(sc, cam));
        CAPTURE(cam);
        CHECK(b.max == (std::string(cam) == "cam1" ? 41'776 : 31'776));
        CHECK(b.jitter == 1'600);
    }
    const auto ctrl = e2e_bounds_and_jitter(sc, t, sid(sc, "control"));
    CHECK(ctrl.max == 7'776);
    CHECK(ctrl.min == 7'376);
    CHECK(ctrl.jitter == 400);
    const auto radar = e2e_bounds_and_jitter(sc, t, sid(sc, "radar"));
    CHECK(radar.max == 13'376);
    CHECK(radar.jitter == 800);

    ShaperOffsetTable partial = t;
    partial.rows.erase(partial.rows.begin());
    CHECK_THROWS_AS(e2e_closed_form(sc, partial, 0, 0, 1200), InvalidInput);
}

TEST_CASE("bounds stay within deadlines and jitter is the payload spread")
{
    const Scenario sc = fixtures::adas_scenario();
    std::vector<Schedule> schedules{fixtures::table3_schedule(sc), fixtures::table7_schedule(sc),
                                    fixtures::table8_schedule(sc)};
    schedules.push_back(*lstb_solve(sc, Mode::NFIC).schedule);
    for (const auto& sched : schedules) {
        REQUIRE(validate_schedule(sc, sched, Mode::NFIC).empty());
        const auto t = build_shaper_offset_table(sc, sched);
        for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
            const auto& st = sc.streams[s];
            const auto b = e2e_bounds_and_jitter(sc, t, s);
            CHECK(b.max <= st.e2e_deadline);
            Nanos span_hi = 0;
            Nanos span_lo = st.period;
            const std::size_t last = st.route.size() - 1;
            for (std::int64_t k = 0; k < static_cast<std::int64_t>(sched.offsets[s][0].size()); ++k) {
                const Nanos span = (sched.at(s, last, k) - k * st.period) - (sched.at(s, 0, k) - k * st.period);
                span_hi = std::max(span_hi, span);
                span_lo = std::min(span_lo, span);
            }
            CHECK(b.jitter == (st.payload_max - st.payload_min) * 8 + span_hi - span_lo);
        }
    }
}

TEST_CASE("closed form breakdown sums to the end-to-end latency")
{
    Scenario sc = fixtures::adas_scenario();
    for (auto& l : sc.links) {
        l.proc_delay = 500;
    }
    const auto t = build_shaper_offset_table(sc, fixtures::table3_schedule(sc));
    for (std::int64_t payload : {1000, 1100, 1200}) {
        const auto b = closed_form_breakdown(sc, t, 0, 1, payload);
        REQUIRE(b.hops.size() == 3);
        CHECK(b.total() == e2e_closed_form(sc, t, 0, 1, payload));
        CHECK(b.hops[0].d_sp == 0);
        CHECK(b.hops[1].d_f == 500);
        CHECK(b.hops[1].d_sp == 21'000 - bytes_to_duration(payload, 1'000'000'000) - 500);
        for (const auto& h : b.hops) {
            CHECK(h.d_sr == 0);
            CHECK(h.d_sp >= 0);
        }
    }
    const std::vector<HopTiming> hops{{0, 0, 0, 0, 100}, {100, 150, 300, 310, 400}};
    Scenario two = sc;
    two.streams[0].route.resize(2);
    const auto m = measured_breakdown(two, 0, hops, 420);
    CHECK(m.hops[1] == HopDelay{150, 50, 10, 90, 20});
    CHECK(m.total() == 420);
}

TEST_CASE("csv and json renderings")
{
    const Scenario sc = fixtures::adas_scenario();
    const auto sched = fixtures::table3_schedule(sc);
    const auto t = build_shaper_offset_table(sc, sched);
    std::ostringstream os;
    write_shaper_table_csv(os, sc, t);
    CHECK(os.str().find("SW1,SW1->CentralHost,SW2->SW1,cam1,4,32.000 132.000,200.000\n") != std::string::npos);
    std::ostringstream gs;
    write_gcl_csv(gs, build_gcl(sc, sched, *sc.find_link("SW2", "SW1")));
    CHECK(gs.str().starts_with("interval_us,Q0,Q1,Q2,Q3,Q4,Q5,Q6,Q7\n0.000-3.000,o,o,o,o,C,o,o,o\n3.000-4.776,C,C,C,C,o,C,C,C\n"));
    CHECK(shaper_table_to_json(sc, t).find("\"eligibility_offsets_ns\"") != std::string::npos);
    CHECK(format_us(9'776) == "9.776");
    CHECK(format_us(-1'500) == "-1.500");
}
