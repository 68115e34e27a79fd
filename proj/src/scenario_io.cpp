#include "ttubs/scenario_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ttubs {

using nlohmann::json;

namespace {

NodeKind parse_kind(const std::string& s)
{
    if (s == "end_station" || s == "es") {
        return NodeKind::EndStation;
    }
    if (s == "switch" || s == "sw") {
        return NodeKind::Switch;
    }
    throw InvalidInput("unknown node kind '" + s + "'");
}

NodeIndex node_ref(const Scenario& sc, const std::string& id)
{
    auto n = sc.find_node(id);
    if (!n) {
        throw InvalidInput("unknown node '" + id + "'");
    }
    return *n;
}

} // namespace

Scenario parse_scenario_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("scenario: ") + e.what());
    }
    try {
        Scenario sc;
        sc.name = doc.value("name", "");
        sc.sync_precision = doc.value("sync_precision_ns", Nanos{0});
        sc.pin_talker_offsets = doc.value("pin_talker_offsets", false);
        for (const auto& n : doc.at("nodes")) {
            sc.nodes.push_back({n.at("id").get<std::string>(), parse_kind(n.value("kind", "end_station"))});
        }
        for (const auto& l : doc.at("links")) {
            Link link;
            link.src = node_ref(sc, l.at("src").get<std::string>());
            link.dst = node_ref(sc, l.at("dst").get<std::string>());
            link.rate_bps = l.value("rate_bps", link.rate_bps);
            link.prop_delay = l.value("prop_delay_ns", Nanos{0});
            link.proc_delay = l.value("proc_delay_ns", Nanos{0});
            link.queue_count = l.value("queues", link.queue_count);
            sc.links.push_back(link);
            if (l.value("duplex", false)) {
                std::swap(link.src, link.dst);
                sc.links.push_back(link);
            }
        }
        for (const auto& s : doc.at("streams")) {
            Stream st;
            st.id = s.at("id").get<std::string>();
            st.period = s.at("period_ns").get<Nanos>();
            st.payload_min = s.at("payload_min").get<std::int64_t>();
            st.payload_max = s.value("payload_max", st.payload_min);
            st.queue = s.value("queue", kTtQueue);
            st.e2e_deadline = s.value("deadline_ns", st.period);
            st.jitter_req = s.value("jitter_ns", Nanos{0});
            st.priority = s.value("priority", 0);
            const auto path = s.at("path").get<std::vector<std::string>>();
            sc.add_stream_by_path(std::move(st), path);
        }
        return sc;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("scenario: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& sc)
{
    json doc;
    doc["name"] = sc.name;
    doc["sync_precision_ns"] = sc.sync_precision;
    doc["pin_talker_offsets"] = sc.pin_talker_offsets;
    doc["nodes"] = json::array();
    for (const Node& n : sc.nodes) {
        doc["nodes"].push_back({{"id", n.id}, {"kind", n.kind == NodeKind::Switch ? "switch" : "end_station"}});
    }
    doc["links"] = json::array();
    for (const Link& l : sc.links) {
        doc["links"].push_back({{"src", sc.nodes.at(l.src).id},
                                {"dst", sc.nodes.at(l.dst).id},
                                {"rate_bps", l.rate_bps},
                                {"prop_delay_ns", l.prop_delay},
                                {"proc_delay_ns", l.proc_delay},
                                {"queues", l.queue_count}});
    }
    doc["streams"] = json::array();
    for (const Stream& st : sc.streams) {
        std::vector<std::string> path;
        if (!st.route.empty()) {
            path.push_back(sc.nodes.at(sc.links.at(st.route.front()).src).id);
            for (LinkIndex l : st.route) {
                path.push_back(sc.nodes.at(sc.links.at(l).dst).id);
            }
        }
        doc["streams"].push_back({{"id", st.id},
                                  {"period_ns", st.period},
                                  {"payload_min", st.payload_min},
                                  {"payload_max", st.payload_max},
                                  {"queue", st.queue},
                                  {"deadline_ns", st.e2e_deadline},
                                  {"jitter_ns", st.jitter_req},
                                  {"priority", st.priority},
                                  {"path", path}});
    }
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidInput("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidInput("cannot write " + path.string());
    }
    out << text;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    return parse_scenario_json(read_text_file(path));
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path)
{
    write_text_file(path, scenario_to_json(sc));
}

std::string schedule_to_json(const Scenario& sc, const Schedule& schedule)
{
    json doc;
    doc["scenario"] = sc.name;
    doc["streams"] = json::array();
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        json hops = json::array();
        for (std::size_t h = 0; h < sc.streams[s].route.size(); ++h) {
            json ns = json::array();
            json us = json::array();
            for (const auto& v : schedule.offsets.at(s).at(h)) {
                if (v) {
                    ns.push_back(*v);
                    us.push_back(static_cast<double>(*v) / kNsPerUs);
                } else {
                    ns.push_back(nullptr);
                    us.push_back(nullptr);
                }
            }
            hops.push_back({{"link", sc.link_name(sc.streams[s].route[h])},
                            {"queue", schedule.queues.at(s).at(h)},
                            {"offsets_ns", ns},
                            {"offsets_us", us}});
        }
        doc["streams"].push_back({{"id", sc.streams[s].id}, {"hops", hops}});
    }
    return doc.dump(2) + "\n";
}

Schedule parse_schedule_json(const Scenario& sc, std::string_view text)
{
    Schedule out = Schedule::empty_for(sc);
    try {
        const json doc = json::parse(text);
        for (const auto& js : doc.at("streams")) {
            const auto id = js.at("id").get<std::string>();
            const auto s = sc.find_stream(id);
            if (!s) {
                throw InvalidInput("schedule: unknown stream '" + id + "'");
            }
            const auto& hops = js.at("hops");
            if (hops.size() != out.offsets[*s].size()) {
                throw InvalidInput("schedule: hop count mismatch for " + id);
            }
            for (std::size_t h = 0; h < hops.size(); ++h) {
                out.queues[*s][h] = hops[h].at("queue").get<int>();
                const auto& ns = hops[h].at("offsets_ns");
                if (ns.size() != out.offsets[*s][h].size()) {
                    throw InvalidInput("schedule: slot count mismatch for " + id);
                }
                for (std::size_t k = 0; k < ns.size(); ++k) {
                    if (!ns[k].is_null()) {
                        out.offsets[*s][h][k] = ns[k].get<Nanos>();
                    }
                }
            }
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("schedule: ") + e.what());
    }
    return out;
}

Schedule load_schedule(const Scenario& sc, const std::filesystem::path& path)
{
    return parse_schedule_json(sc, read_text_file(path));
}

} // namespace ttubs
