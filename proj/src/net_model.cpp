#include "ttubs/net_model.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace ttubs {

std::optional<NodeIndex> Scenario::find_node(std::string_view id) const
{
    for (NodeIndex i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<LinkIndex> Scenario::find_link(NodeIndex src, NodeIndex dst) const
{
    for (LinkIndex i = 0; i < links.size(); ++i) {
        if (links[i].src == src && links[i].dst == dst) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<LinkIndex> Scenario::find_link(std::string_view src, std::string_view dst) const
{
    auto a = find_node(src);
    auto b = find_node(dst);
    if (!a || !b) {
        return std::nullopt;
    }
    return find_link(*a, *b);
}

std::optional<StreamIndex> Scenario::find_stream(std::string_view id) const
{
    for (StreamIndex i = 0; i < streams.size(); ++i) {
        if (streams[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

NodeIndex Scenario::talker(StreamIndex s) const
{
    return links.at(streams.at(s).route.front()).src;
}

NodeIndex Scenario::listener(StreamIndex s) const
{
    return links.at(streams.at(s).route.back()).dst;
}

std::string Scenario::link_name(LinkIndex l) const
{
    const Link& link = links.at(l);
    return nodes.at(link.src).id + "->" + nodes.at(link.dst).id;
}

std::vector<StreamIndex> Scenario::streams_on_link(LinkIndex l) const
{
    std::vector<StreamIndex> out;
    for (StreamIndex s = 0; s < streams.size(); ++s) {
        const auto& r = streams[s].route;
        if (std::find(r.begin(), r.end(), l) != r.end()) {
            out.push_back(s);
        }
    }
    return out;
}

std::optional<std::size_t> Scenario::hop_of(StreamIndex s, LinkIndex l) const
{
    const auto& r = streams.at(s).route;
    auto it = std::find(r.begin(), r.end(), l);
    if (it == r.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - r.begin());
}

StreamIndex Scenario::add_stream_by_path(Stream stream, std::span<const std::string> node_path)
{
    if (node_path.size() < 2) {
        throw InvalidInput("stream " + stream.id + ": path needs at least two nodes");
    }
    stream.route.clear();
    for (std::size_t i = 0; i + 1 < node_path.size(); ++i) {
        auto l = find_link(node_path[i], node_path[i + 1]);
        if (!l) {
            throw InvalidInput("stream " + stream.id + ": no link " + node_path[i] + "->" + node_path[i + 1]);
        }
        stream.route.push_back(*l);
    }
    streams.push_back(std::move(stream));
    return streams.size() - 1;
}

Nanos hyper_period(std::span<const Nanos> periods)
{
    if (periods.empty()) {
        throw InvalidInput("hyper_period: empty period list");
    }
    Nanos hp = 1;
    for (Nanos p : periods) {
        if (p <= 0) {
            throw InvalidInput("hyper_period: periods must be positive");
        }
        hp = std::lcm(hp, p);
    }
    return hp;
}

Nanos bytes_to_duration(std::int64_t payload, std::int64_t rate_bps)
{
    if (rate_bps <= 0) {
        throw InvalidInput("bytes_to_duration: rate must be positive");
    }
    if (payload < 0) {
        throw InvalidInput("bytes_to_duration: negative payload");
    }
    // bits * 1e9 / rate, rounded up; __int128 keeps jumbo rates exact.
    const __int128 num = static_cast<__int128>(payload + kFrameOverheadBytes) * 8 * 1'000'000'000;
    const __int128 q = (num + rate_bps - 1) / rate_bps;
    return static_cast<Nanos>(q);
}

Nanos frame_duration(const Scenario& sc, StreamIndex s, LinkIndex l)
{
    return bytes_to_duration(sc.streams.at(s).payload_max, sc.links.at(l).rate_bps);
}

namespace {

struct DisjointSet {
    std::vector<std::size_t> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

} // namespace

std::vector<Nanos> stream_horizons(const Scenario& sc)
{
    const std::size_t n = sc.streams.size();
    DisjointSet groups(n);
    std::vector<std::optional<StreamIndex>> first_on_link(sc.links.size());
    for (StreamIndex s = 0; s < n; ++s) {
        for (LinkIndex l : sc.streams[s].route) {
            if (l >= sc.links.size()) {
                continue;
            }
            if (first_on_link[l]) {
                groups.unite(*first_on_link[l], s);
            } else {
                first_on_link[l] = s;
            }
        }
    }
    std::vector<Nanos> group_hp(n, 1);
    for (StreamIndex s = 0; s < n; ++s) {
        const Nanos p = sc.streams[s].period;
        if (p > 0) {
            auto& g = group_hp[groups.find(s)];
            g = std::lcm(g, p);
        }
    }
    std::vector<Nanos> out(n);
    for (StreamIndex s = 0; s < n; ++s) {
        out[s] = group_hp[groups.find(s)];
    }
    return out;
}

Nanos link_cycle(const Scenario& sc, std::span<const Nanos> horizons, LinkIndex l)
{
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        const auto& r = sc.streams[s].route;
        if (std::find(r.begin(), r.end(), l) != r.end()) {
            return horizons[s];
        }
    }
    return 0;
}

Nanos link_cycle(const Scenario& sc, LinkIndex l)
{
    const auto h = stream_horizons(sc);
    return link_cycle(sc, h, l);
}

std::vector<FrameInstance> expand_frame_instances(const Scenario& sc)
{
    const auto horizons = stream_horizons(sc);
    std::vector<FrameInstance> out;
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        const Stream& st = sc.streams[s];
        const std::int64_t slots = horizons[s] / st.period;
        for (std::size_t h = 0; h < st.route.size(); ++h) {
            const Nanos dur = frame_duration(sc, s, st.route[h]);
            for (std::int64_t k = 0; k < slots; ++k) {
                out.push_back({s, st.route[h], h, k, dur});
            }
        }
    }
    return out;
}

std::vector<Defect> validate_scenario(const Scenario& sc)
{
    std::vector<Defect> defects;
    auto add = [&](std::string where, std::string msg) { defects.push_back({std::move(where), std::move(msg)}); };

    std::set<std::string> node_ids;
    for (const Node& n : sc.nodes) {
        if (!node_ids.insert(n.id).second) {
            add("node " + n.id, "duplicate node id");
        }
    }
    if (sc.sync_precision < 0) {
        add("scenario", "sync precision must be non-negative");
    }

    std::set<std::pair<NodeIndex, NodeIndex>> endpoints;
    for (LinkIndex l = 0; l < sc.links.size(); ++l) {
        const Link& link = sc.links[l];
        std::string where = "link #" + std::to_string(l);
        if (link.src >= sc.nodes.size() || link.dst >= sc.nodes.size()) {
            add(where, "endpoint out of range");
            continue;
        }
        where = "link " + sc.link_name(l);
        if (link.src == link.dst) {
            add(where, "self loop");
        }
        if (!endpoints.insert({link.src, link.dst}).second) {
            add(where, "duplicate (src, dst)");
        }
        if (link.rate_bps <= 0) {
            add(where, "rate must be positive");
        }
        if (link.queue_count < 1) {
            add(where, "queue count must be at least 1");
        }
        if (link.prop_delay < 0) {
            add(where, "propagation delay must be non-negative");
        }
        if (link.proc_delay < 0) {
            add(where, "processing delay must be non-negative");
        }
    }

    std::set<std::string> stream_ids;
    for (const Stream& st : sc.streams) {
        const std::string where = "stream " + st.id;
        if (!stream_ids.insert(st.id).second) {
            add(where, "duplicate stream id");
        }
        if (st.period <= 0) {
            add(where, "period must be positive");
        }
        if (st.e2e_deadline <= 0) {
            add(where, "deadline must be positive");
        }
        if (st.jitter_req < 0) {
            add(where, "jitter requirement must be non-negative");
        }
        if (st.payload_min <= 0 || st.payload_min > st.payload_max || st.payload_max > kMaxPayloadBytes) {
            add(where, "payload bounds must satisfy 0 < min <= max <= 1500");
        }
        if (st.route.empty()) {
            add(where, "empty route");
            continue;
        }
        bool in_range = true;
        for (LinkIndex l : st.route) {
            if (l >= sc.links.size()) {
                in_range = false;
            }
        }
        if (!in_range) {
            add(where, "route references unknown link");
            continue;
        }
        bool path = true;
        std::set<LinkIndex> seen;
        for (std::size_t i = 0; i < st.route.size(); ++i) {
            if (!seen.insert(st.route[i]).second) {
                path = false;
            }
            if (i > 0 && sc.links[st.route[i - 1]].dst != sc.links[st.route[i]].src) {
                path = false;
            }
        }
        if (!path) {
            add(where, "route not a path");
        }
        const Link& first = sc.links[st.route.front()];
        const Link& last = sc.links[st.route.back()];
        if (first.src < sc.nodes.size() && sc.nodes[first.src].kind != NodeKind::EndStation) {
            add(where, "talker must be an end station");
        }
        if (last.dst < sc.nodes.size() && sc.nodes[last.dst].kind != NodeKind::EndStation) {
            add(where, "listener must be an end station");
        }
        for (std::size_t i = 0; i + 1 < st.route.size(); ++i) {
            const NodeIndex mid = sc.links[st.route[i]].dst;
            if (mid < sc.nodes.size() && sc.nodes[mid].kind != NodeKind::Switch) {
                add(where, "intermediate node " + sc.nodes[mid].id + " is not a switch");
            }
        }
    }
    return defects;
}

void require_valid(const Scenario& sc)
{
    const auto defects = validate_scenario(sc);
    if (defects.empty()) {
        return;
    }
    std::ostringstream os;
    os << "invalid scenario:";
    for (const auto& d : defects) {
        os << "\n  " << d.where << ": " << d.message;
    }
    throw InvalidInput(os.str());
}

} // namespace ttubs
