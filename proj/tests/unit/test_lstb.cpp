#include <doctest.h>

#include "ttubs/constraints.hpp"
#include "ttubs/fixtures.hpp"
#include "ttubs/lstb.hpp"

#include <sstream>

using namespace ttubs;

namespace {

// payload giving a wire time of `ns` at 1 Gb/s
std::int64_t payload_for(Nanos ns)
{
    return ns / 8 - kFrameOverheadBytes;
}

Scenario one_link(const std::vector<std::pair<Nanos, Nanos>>& period_and_duration)
{
    Scenario sc;
    sc.nodes = {{"A", NodeKind::EndStation}, {"B", NodeKind::EndStation}};
    sc.links = {Link{0, 1}};
    int i = 0;
    for (auto [t, d] : period_and_duration) {
        const auto p = payload_for(d);
        sc.streams.push_back(Stream{"s" + std::to_string(i++), t, p, p, 4, t, 0, {0}, 0});
    }
    return sc;
}

void place(SearchState& st, StreamIndex s, std::size_t hop, std::int64_t slot, Nanos absolute)
{
    const std::size_t idx = st.index_of(s, hop, slot);
    st.assign(idx, absolute - slot * st.scenario().streams[s].period);
}

} // namespace

TEST_CASE("frame order is period, id, hop, slot")
{
    const Scenario sc = fixtures::adas_scenario();
    const SearchState st(sc, Mode::NFIC);
    REQUIRE(st.order().size() == 18);
    CHECK(sc.streams[st.order()[0].stream].id == "cam1");
    CHECK(st.order()[1].slot == 1);
    CHECK(st.order()[2].hop == 1);
    CHECK(sc.streams[st.order()[6].stream].id == "cam2");
    CHECK(sc.streams[st.order()[12].stream].id == "control");
    CHECK(sc.streams[st.order()[15].stream].id == "radar");
}

TEST_CASE("adas solves in both modes")
{
    const Scenario sc = fixtures::adas_scenario();
    for (Mode m : {Mode::NFIC, Mode::WA}) {
        CAPTURE(to_string(m));
        const auto r = lstb_solve(sc, m);
        REQUIRE(r.status == LstbStatus::Sat);
        CHECK(validate_schedule(sc, *r.schedule, m).empty());
        CHECK(validate_schedule(sc, *r.schedule, Mode::NFIC).empty());
        const auto again = lstb_solve(sc, m);
        CHECK(*again.schedule == *r.schedule);
        CHECK(again.stats.backjumps == r.stats.backjumps);
    }
}

TEST_CASE("single frame takes offset 0")
{
    const Scenario sc = one_link({{10'000, 2'000}});
    const auto r = lstb_solve(sc, Mode::NFIC);
    REQUIRE(r.status == LstbStatus::Sat);
    CHECK(r.schedule->at(0, 0, 0) == 0);
    CHECK(r.stats.backjumps == 0);
}

TEST_CASE("two 6us frames in a 10us period cannot share a link")
{
    const Scenario sc = one_link({{10'000, 6'000}, {10'000, 6'000}});
    const auto r = lstb_solve(sc, Mode::NFIC);
    CHECK(r.status == LstbStatus::Infeasible);
    // every offset of the first frame in [0, T - L] is retried once
    CHECK(r.stats.backjumps == 10'000 - 6'000 + 1);
    CHECK(lstb_solve(sc, Mode::NFIC, {2, 60.0}).status == LstbStatus::LimitExceeded);
}

TEST_CASE("frame longer than its period has no offset")
{
    const Scenario sc = one_link({{5'000, 6'000}});
    SearchState st(sc, Mode::NFIC);
    const Probe p = next_feasible_offset(st, 0);
    CHECK_FALSE(p.phi.has_value());
    CHECK(p.conflicts.empty());
    CHECK(lstb_solve(sc, Mode::NFIC).status == LstbStatus::Infeasible);
}

TEST_CASE("next_feasible_offset sweeps past occupied windows")
{
    const Scenario sc = fixtures::adas_scenario();
    const Schedule t3 = fixtures::table3_schedule(sc);
    SearchState st(sc, Mode::NFIC);
    for (StreamIndex s = 0; s < 4; ++s) {
        for (std::size_t h = 0; h < 2; ++h) {
            for (std::int64_t k = 0; k < static_cast<std::int64_t>(t3.offsets[s][h].size()); ++k) {
                place(st, s, h, k, t3.at(s, h, k));
            }
        }
    }
    place(st, 1, 2, 0, 22'000); // cam2 at SW1: [22 000, 31 776)
    const std::size_t cam1 = st.index_of(0, 2, 0);
    const Probe p = next_feasible_offset(st, cam1);
    REQUIRE(p.phi.has_value());
    CHECK(*p.phi == 31'776);
    CHECK(p.conflicts.count(st.index_of(1, 2, 0)) == 1);
    CHECK(p.conflicts.count(st.index_of(0, 1, 0)) == 1);

    // an empty link with no upstream gives 0
    SearchState fresh(sc, Mode::NFIC);
    const Probe q = next_feasible_offset(fresh, 0);
    REQUIRE(q.phi.has_value());
    CHECK(*q.phi == 0);
}

TEST_CASE("missing radar entry of the AT-NFIC table is the earliest feasible offset")
{
    const Scenario sc = fixtures::adas_scenario();
    const Schedule t7 = fixtures::table7_schedule(sc);
    SearchState st(sc, Mode::NFIC);
    for (StreamIndex s = 0; s < 4; ++s) {
        for (std::size_t h = 0; h < 3; ++h) {
            if (sc.streams[s].id == "radar" && h == 1) {
                continue;
            }
            for (std::int64_t k = 0; k < static_cast<std::int64_t>(t7.offsets[s][h].size()); ++k) {
                place(st, s, h, k, t7.at(s, h, k));
            }
        }
    }
    const auto radar = *sc.find_stream("radar");
    const Probe p = next_feasible_offset(st, st.index_of(radar, 1, 0));
    REQUIRE(p.phi.has_value());
    CHECK(*p.phi == t7.at(radar, 1, 0));
}

TEST_CASE("backjump targets the most recent conflicting frame")
{
    const Scenario sc = fixtures::adas_scenario();
    SearchState st(sc, Mode::NFIC);
    for (std::size_t i = 0; i < 9; ++i) {
        st.assign(i, static_cast<Nanos>(i) * 100);
    }
    st.cursor = 9;
    st.conflicts[9] = {1};
    REQUIRE(backjump(st, {3, 7}));
    CHECK(st.cursor == 7);
    CHECK(st.backjumps == 1);
    CHECK(st.floor[7] == 701);
    CHECK(st.conflicts[7] == std::set<std::size_t>{1, 3});
    CHECK_FALSE(st.offset(7).has_value());
    CHECK_FALSE(st.offset(8).has_value());
    CHECK(st.offset(6).has_value());
    CHECK(st.conflicts[9].empty());

    REQUIRE(backjump(st, {}));
    CHECK(st.cursor == 3);
    CHECK(st.floor[7] == 0);
    CHECK(st.conflicts[3] == std::set<std::size_t>{1});

    SearchState first(sc, Mode::NFIC);
    CHECK_FALSE(backjump(first, {}));
}

TEST_CASE("FIC keeps frames that meet in a queue apart")
{
    // one queue per link: isolation must be settled by timing alone
    Scenario sc = fixtures::adas_scenario();
    for (auto& l : sc.links) {
        l.queue_count = 1;
    }
    const auto nfic = lstb_solve(sc, Mode::NFIC);
    const auto fic = lstb_solve(sc, Mode::WA);
    REQUIRE(nfic.status == LstbStatus::Sat);
    REQUIRE(fic.status == LstbStatus::Sat);
    CHECK(validate_schedule(sc, *fic.schedule, Mode::WA).empty());
    CHECK(nfic.stats.backjumps <= fic.stats.backjumps);
}

TEST_CASE("search statistics csv")
{
    const Scenario sc = fixtures::adas_scenario();
    std::ostringstream os;
    write_lstb_csv_header(os);
    write_lstb_csv_row(os, "adas", Mode::NFIC, lstb_solve(sc, Mode::NFIC));
    CHECK(os.str().starts_with("scenario,mode,status,backjumps,placements,seconds\nadas,nfic,sat,"));
}
