#include "ttubs/artifacts.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace ttubs {

using nlohmann::json;

std::string format_us(Nanos ns)
{
    char buf[48];
    const char* sign = ns < 0 ? "-" : "";
    const auto a = static_cast<unsigned long long>(ns < 0 ? -ns : ns);
    std::snprintf(buf, sizeof buf, "%s%llu.%03llu", sign, a / 1000, a % 1000);
    return buf;
}

const ShaperRow* ShaperOffsetTable::find(StreamIndex s, std::size_t hop) const
{
    for (const auto& r : rows) {
        if (r.stream == s && r.hop == hop) {
            return &r;
        }
    }
    return nullptr;
}

const ShaperRow& ShaperOffsetTable::at(StreamIndex s, std::size_t hop) const
{
    const ShaperRow* r = find(s, hop);
    if (r == nullptr) {
        throw InvalidInput("shaper table has no row for stream #" + std::to_string(s) + " hop " + std::to_string(hop));
    }
    return *r;
}

const ShaperRow* ShaperOffsetTable::match(NodeIndex node, LinkIndex ingress, StreamIndex s) const
{
    for (const auto& r : rows) {
        if (r.node == node && r.stream == s && r.ingress && *r.ingress == ingress) {
            return &r;
        }
    }
    return nullptr;
}

ShaperOffsetTable build_shaper_offset_table(const Scenario& sc, const Schedule& schedule)
{
    const auto horizons = stream_horizons(sc);
    ShaperOffsetTable t;
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        const Stream& st = sc.streams[s];
        for (std::size_t h = 0; h < st.route.size(); ++h) {
            ShaperRow row;
            row.egress = st.route[h];
            row.node = sc.links[row.egress].src;
            if (h > 0) {
                row.ingress = st.route[h - 1];
            }
            row.stream = s;
            row.hop = h;
            row.queue = schedule.queues.at(s).at(h);
            row.cycle = horizons[s];
            const std::int64_t slots = horizons[s] / st.period;
            for (std::int64_t k = 0; k < slots; ++k) {
                const Nanos v = schedule.at(s, h, k);
                if (v < 0 || v >= row.cycle || (!row.offsets.empty() && v <= row.offsets.back())) {
                    throw InvalidSchedule("offsets of " + st.id + " on " + sc.link_name(row.egress) +
                                          " are not increasing within the cycle");
                }
                row.offsets.push_back(v);
            }
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

Schedule schedule_from_table(const Scenario& sc, const ShaperOffsetTable& table)
{
    Schedule out = Schedule::empty_for(sc);
    for (const auto& r : table.rows) {
        for (std::size_t k = 0; k < r.offsets.size(); ++k) {
            out.set(r.stream, r.hop, static_cast<std::int64_t>(k), r.offsets[k]);
        }
        out.queues.at(r.stream).at(r.hop) = r.queue;
    }
    return out;
}

const GateInterval& GateControlList::interval_at(Nanos t) const
{
    const Nanos tm = ((t % cycle) + cycle) % cycle;
    auto it = std::upper_bound(intervals.begin(), intervals.end(), tm,
                               [](Nanos v, const GateInterval& g) { return v < g.start; });
    return *std::prev(it);
}

Nanos GateControlList::interval_end(Nanos t) const
{
    const Nanos tm = ((t % cycle) + cycle) % cycle;
    return t - tm + interval_at(t).end;
}

GateVector gcl_gate_state(const GateControlList& gcl, Nanos t)
{
    return gcl.state_at(t);
}

GateControlList build_gcl(const Scenario& sc, const Schedule& schedule, LinkIndex egress)
{
    GateControlList g;
    g.link = egress;
    g.cycle = link_cycle(sc, egress);
    if (g.cycle == 0) {
        std::vector<Nanos> periods;
        for (const auto& st : sc.streams) {
            periods.push_back(st.period);
        }
        g.cycle = periods.empty() ? kNsPerMs : hyper_period(periods);
    }

    std::vector<FrameWindow> windows;
    for (StreamIndex s : sc.streams_on_link(egress)) {
        const std::size_t h = *sc.hop_of(s, egress);
        const int q = schedule.queues.at(s).at(h);
        if (q < 0 || q >= kGateCount) {
            throw InvalidSchedule("queue out of range for " + sc.streams[s].id);
        }
        g.tt_queues.insert(q);
        const Nanos dur = frame_duration(sc, s, egress);
        for (std::size_t k = 0; k < schedule.offsets.at(s).at(h).size(); ++k) {
            windows.push_back({schedule.at(s, h, static_cast<std::int64_t>(k)), dur, q});
        }
    }
    if (g.tt_queues.empty()) {
        g.tt_queues.insert(nfic_queue(sc.links.at(egress)));
    }
    std::sort(windows.begin(), windows.end(), [](const FrameWindow& a, const FrameWindow& b) {
        return a.start < b.start;
    });

    GateVector gap{};
    for (int q = 0; q < kGateCount; ++q) {
        gap[static_cast<std::size_t>(q)] = g.tt_queues.count(q) == 0;
    }
    Nanos cur = 0;
    for (const FrameWindow& w : windows) {
        if (w.start < cur) {
            throw InvalidSchedule("overlapping windows on " + sc.link_name(egress) + " at " + std::to_string(w.start));
        }
        if (w.start + w.duration > g.cycle) {
            throw InvalidSchedule("window beyond the cycle on " + sc.link_name(egress));
        }
        if (w.start > cur) {
            g.intervals.push_back({cur, w.start, gap});
        }
        GateVector open{};
        open[static_cast<std::size_t>(w.queue)] = true;
        g.intervals.push_back({w.start, w.start + w.duration, open});
        cur = w.start + w.duration;
    }
    if (cur < g.cycle) {
        g.intervals.push_back({cur, g.cycle, gap});
    }
    return g;
}

std::vector<FrameWindow> windows_from_gcl(const GateControlList& gcl)
{
    std::vector<FrameWindow> out;
    for (const auto& iv : gcl.intervals) {
        int tt_open = 0;
        int other_open = 0;
        int q_open = -1;
        for (int q = 0; q < kGateCount; ++q) {
            if (!iv.open[static_cast<std::size_t>(q)]) {
                continue;
            }
            if (gcl.tt_queues.count(q) != 0) {
                ++tt_open;
                q_open = q;
            } else {
                ++other_open;
            }
        }
        if (tt_open == 1 && other_open == 0) {
            out.push_back({iv.start, iv.end - iv.start, q_open});
        }
    }
    return out;
}

Nanos e2e_closed_form(const Scenario& sc, const ShaperOffsetTable& table, StreamIndex s, std::int64_t slot,
                      std::int64_t payload)
{
    const Stream& st = sc.streams.at(s);
    const std::size_t m = st.route.size() - 1;
    const ShaperRow& first = table.at(s, 0);
    const ShaperRow& last = table.at(s, m);
    const auto k = static_cast<std::size_t>(slot);
    const Link& l = sc.links[st.route[m]];
    return last.offsets.at(k) - first.offsets.at(k) + bytes_to_duration(payload, l.rate_bps) + l.prop_delay;
}

E2EBounds e2e_bounds_and_jitter(const Scenario& sc, const ShaperOffsetTable& table, StreamIndex s)
{
    const Stream& st = sc.streams.at(s);
    const std::size_t slots = table.at(s, 0).offsets.size();
    E2EBounds b;
    for (std::size_t k = 0; k < slots; ++k) {
        const Nanos hi = e2e_closed_form(sc, table, s, static_cast<std::int64_t>(k), st.payload_max);
        const Nanos lo = e2e_closed_form(sc, table, s, static_cast<std::int64_t>(k), st.payload_min);
        b.max = k == 0 ? hi : std::max(b.max, hi);
        b.min = k == 0 ? lo : std::min(b.min, lo);
    }
    b.jitter = b.max - b.min;
    return b;
}

Nanos LatencyBreakdown::total() const
{
    return std::accumulate(hops.begin(), hops.end(), Nanos{0},
                           [](Nanos acc, const HopDelay& h) { return acc + h.total(); });
}

LatencyBreakdown closed_form_breakdown(const Scenario& sc, const ShaperOffsetTable& table, StreamIndex s,
                                       std::int64_t slot, std::int64_t payload)
{
    const Stream& st = sc.streams.at(s);
    const auto k = static_cast<std::size_t>(slot);
    LatencyBreakdown out;
    for (std::size_t h = 0; h < st.route.size(); ++h) {
        const Link& l = sc.links[st.route[h]];
        HopDelay d;
        d.d_t = bytes_to_duration(payload, l.rate_bps);
        d.d_p = l.prop_delay;
        if (h > 0) {
            const Link& up = sc.links[st.route[h - 1]];
            const Nanos arrive = table.at(s, h - 1).offsets.at(k) + bytes_to_duration(payload, up.rate_bps) +
                                 up.prop_delay;
            d.d_f = up.proc_delay;
            d.d_sp = table.at(s, h).offsets.at(k) - (arrive + d.d_f);
        }
        out.hops.push_back(d);
    }
    return out;
}

LatencyBreakdown measured_breakdown(const Scenario& sc, StreamIndex s, const std::vector<HopTiming>& hops,
                                    Nanos received)
{
    if (hops.size() != sc.streams.at(s).route.size()) {
        throw InvalidInput("measured_breakdown: hop count mismatch");
    }
    LatencyBreakdown out;
    for (std::size_t h = 0; h < hops.size(); ++h) {
        const HopTiming& t = hops[h];
        HopDelay d;
        d.d_f = t.ready - t.arrive;
        d.d_sp = t.eligible - t.ready;
        d.d_sr = t.tx_start - t.eligible;
        d.d_t = t.tx_end - t.tx_start;
        d.d_p = (h + 1 < hops.size() ? hops[h + 1].arrive : received) - t.tx_end;
        out.hops.push_back(d);
    }
    return out;
}

namespace {

std::vector<const ShaperRow*> table_order(const ShaperOffsetTable& t)
{
    std::vector<const ShaperRow*> rows;
    for (const auto& r : t.rows) {
        rows.push_back(&r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ShaperRow* a, const ShaperRow* b) {
        const auto ia = a->ingress.value_or(a->egress);
        const auto ib = b->ingress.value_or(b->egress);
        return std::tie(a->node, a->egress, ia, a->stream) < std::tie(b->node, b->egress, ib, b->stream);
    });
    return rows;
}

} // namespace

void write_shaper_table_csv(std::ostream& os, const Scenario& sc, const ShaperOffsetTable& t)
{
    os << "node,egress,ingress,stream,queue,eligibility_offsets_us,cycle_time_us\n";
    for (const ShaperRow* r : table_order(t)) {
        os << sc.nodes[r->node].id << ',' << sc.link_name(r->egress) << ','
           << (r->ingress ? sc.link_name(*r->ingress) : std::string("-")) << ',' << sc.streams[r->stream].id << ','
           << r->queue << ',';
        for (std::size_t i = 0; i < r->offsets.size(); ++i) {
            os << (i ? " " : "") << format_us(r->offsets[i]);
        }
        os << ',' << format_us(r->cycle) << '\n';
    }
}

void write_gcl_csv(std::ostream& os, const GateControlList& g)
{
    os << "interval_us";
    for (int q = 0; q < kGateCount; ++q) {
        os << ",Q" << q;
    }
    os << '\n';
    for (const auto& iv : g.intervals) {
        os << format_us(iv.start) << '-' << format_us(iv.end);
        for (bool open : iv.open) {
            os << ',' << (open ? 'o' : 'C');
        }
        os << '\n';
    }
}

std::string shaper_table_to_json(const Scenario& sc, const ShaperOffsetTable& t)
{
    json rows = json::array();
    for (const ShaperRow* r : table_order(t)) {
        json us = json::array();
        for (Nanos v : r->offsets) {
            us.push_back(format_us(v));
        }
        rows.push_back({{"node", sc.nodes[r->node].id},
                        {"egress", sc.link_name(r->egress)},
                        {"ingress", r->ingress ? json(sc.link_name(*r->ingress)) : json(nullptr)},
                        {"stream", sc.streams[r->stream].id},
                        {"queue", r->queue},
                        {"eligibility_offsets_ns", r->offsets},
                        {"eligibility_offsets_us", us},
                        {"cycle_time_ns", r->cycle}});
    }
    return json{{"scenario", sc.name}, {"rows", rows}}.dump(2) + "\n";
}

std::string gcl_to_json(const Scenario& sc, const GateControlList& g)
{
    json ivs = json::array();
    for (const auto& iv : g.intervals) {
        std::string gates;
        for (bool open : iv.open) {
            gates += open ? 'o' : 'C';
        }
        ivs.push_back({{"start_ns", iv.start}, {"end_ns", iv.end}, {"gates", gates}});
    }
    return json{{"link", sc.link_name(g.link)}, {"cycle_time_ns", g.cycle}, {"intervals", ivs}}.dump(2) + "\n";
}

} // namespace ttubs
