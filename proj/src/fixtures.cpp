#include "ttubs/fixtures.hpp"

#include <map>

namespace ttubs::fixtures {

Scenario adas_scenario()
{
    Scenario sc;
    sc.name = "adas-star";
    sc.pin_talker_offsets = true;
    for (const char* id : {"AV1", "AV2", "Radar", "ZonalHost", "CentralHost"}) {
        sc.nodes.push_back({id, NodeKind::EndStation});
    }
    sc.nodes.push_back({"SW2", NodeKind::Switch});
    sc.nodes.push_back({"SW1", NodeKind::Switch});

    auto duplex = [&](const char* a, const char* b) {
        Link l;
        l.src = *sc.find_node(a);
        l.dst = *sc.find_node(b);
        sc.links.push_back(l);
        std::swap(l.src, l.dst);
        sc.links.push_back(l);
    };
    duplex("AV1", "SW2");
    duplex("AV2", "SW2");
    duplex("Radar", "SW2");
    duplex("ZonalHost", "SW2");
    duplex("SW2", "SW1");
    duplex("SW1", "CentralHost");

    auto add = [&](const char* id, const char* talker, Nanos period_us, std::int64_t pmin, std::int64_t pmax,
                   int priority) {
        Stream st;
        st.id = id;
        st.period = period_us * kNsPerUs;
        st.payload_min = pmin;
        st.payload_max = pmax;
        st.queue = kTtQueue;
        st.e2e_deadline = st.period;
        st.jitter_req = st.period / 10;
        st.priority = priority;
        const std::vector<std::string> path{talker, "SW2", "SW1", "CentralHost"};
        sc.add_stream_by_path(std::move(st), path);
    };
    add("cam1", "AV1", 100, 1000, 1200, 4);
    add("cam2", "AV2", 100, 1000, 1200, 5);
    add("radar", "Radar", 200, 300, 400, 6);
    add("control", "ZonalHost", 200, 150, 200, 7);
    return sc;
}

namespace {

/// Per stream: SW2 egress offsets then SW1 egress offsets, one per slot, in ns.
using Table = std::map<std::string, std::pair<std::vector<Nanos>, std::vector<Nanos>>>;

Schedule from_table(const Scenario& sc, const Table& t)
{
    std::vector<std::vector<std::vector<Nanos>>> offsets(sc.streams.size());
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        const Stream& st = sc.streams[s];
        const auto& row = t.at(st.id);
        std::vector<Nanos> talker;
        for (std::size_t k = 0; k < row.first.size(); ++k) {
            talker.push_back(static_cast<Nanos>(k) * st.period);
        }
        offsets[s] = {talker, row.first, row.second};
    }
    return schedule_from_offsets(sc, offsets);
}

constexpr Nanos us(Nanos v)
{
    return v * kNsPerUs;
}

} // namespace

Schedule table3_schedule(const Scenario& adas)
{
    return from_table(adas, {{"control", {{us(3)}, {us(6)}}},
                             {"cam1", {{us(21), us(121)}, {us(32), us(132)}}},
                             {"cam2", {{us(11), us(111)}, {us(22), us(122)}}},
                             {"radar", {{us(5)}, {us(10)}}}});
}

Schedule table8_schedule(const Scenario& adas)
{
    return from_table(adas, {{"control", {{us(2)}, {us(4)}}},
                             {"cam1", {{us(10), us(110)}, {us(20), us(120)}}},
                             {"cam2", {{us(20), us(120)}, {us(30), us(130)}}},
                             {"radar", {{us(4)}, {us(8)}}}});
}

Schedule table7_schedule(const Scenario& adas)
{
    return from_table(adas, {{"control", {{us(74)}, {us(77)}}},
                             {"cam1", {{us(64), us(137)}, {us(79), us(175)}}},
                             {"cam2", {{us(31), us(151)}, {us(89), us(189)}}},
                             {"radar", {{3376}, {us(185)}}}});
}

Schedule table6_schedule(const Scenario& adas)
{
    Schedule s = table3_schedule(adas);
    const std::map<std::string, int> queue{{"control", 7}, {"radar", 6}, {"cam2", 5}, {"cam1", 4}};
    for (StreamIndex i = 0; i < adas.streams.size(); ++i) {
        for (std::size_t h = 1; h < adas.streams[i].route.size(); ++h) {
            s.queues[i][h] = queue.at(adas.streams[i].id);
        }
    }
    return s;
}

AttackConfig loss_attack(const Scenario& adas)
{
    return parse_attack(adas, "drop,SW2:AV2/cam2,21us,1");
}

AttackConfig delay_attack(const Scenario& adas, Nanos delay)
{
    AttackConfig a = parse_attack(adas, "delay,SW1:SW2/cam2,21us,1,0");
    a.delay = delay;
    return a;
}

} // namespace ttubs::fixtures
