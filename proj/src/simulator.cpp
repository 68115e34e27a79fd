#include "ttubs/simulator.hpp"

#include "ttubs/constraints.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <tuple>
#include <unordered_map>

namespace ttubs {

std::string_view to_string(EgressMode m)
{
    return m == EgressMode::Tas ? "tas" : "ttubs";
}

EgressMode parse_egress_mode(std::string_view text)
{
    if (text == "tas" || text == "TAS") {
        return EgressMode::Tas;
    }
    if (text == "ttubs" || text == "TTUBS" || text == "tt-ubs" || text == "TT-UBS") {
        return EgressMode::TtUbs;
    }
    throw InvalidInput("unknown egress mode '" + std::string(text) + "'");
}

std::string_view to_string(Disposition d)
{
    switch (d) {
    case Disposition::Delivered:
        return "delivered";
    case Disposition::AttackDropped:
        return "attack-dropped";
    case Disposition::TimeoutDiscarded:
        return "timeout-discarded";
    case Disposition::Displaced:
        return "displaced";
    case Disposition::Pending:
        return "pending";
    }
    return "pending";
}

Nanos parse_duration(std::string_view text)
{
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr == text.data() || value < 0) {
        throw InvalidInput("bad duration '" + std::string(text) + "'");
    }
    const std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
    if (unit.empty() || unit == "ns") {
        return value;
    }
    if (unit == "us") {
        return value * kNsPerUs;
    }
    if (unit == "ms") {
        return value * kNsPerMs;
    }
    if (unit == "s") {
        return value * 1'000 * kNsPerMs;
    }
    throw InvalidInput("bad duration unit in '" + std::string(text) + "'");
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        out.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) {
            return out;
        }
        pos = next + 1;
    }
}

} // namespace

AttackConfig parse_attack(const Scenario& sc, std::string_view text)
{
    const auto parts = split(text, ',');
    if (parts.size() != 4 && parts.size() != 5) {
        throw InvalidInput("attack needs TYPE,SWITCH:FROM[/STREAM],START,COUNT[,DELAY]: '" + std::string(text) + "'");
    }
    AttackConfig a;
    if (parts[0] == "drop" || parts[0] == "1") {
        a.type = AttackType::Drop;
    } else if (parts[0] == "delay" || parts[0] == "2") {
        a.type = AttackType::Delay;
    } else {
        throw InvalidInput("unknown attack type '" + std::string(parts[0]) + "'");
    }
    std::string_view port = parts[1];
    if (const auto slash = port.find('/'); slash != std::string_view::npos) {
        const auto s = sc.find_stream(port.substr(slash + 1));
        if (!s) {
            throw InvalidInput("unknown stream in attack port '" + std::string(port) + "'");
        }
        a.stream = *s;
        port = port.substr(0, slash);
    }
    const auto colon = port.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidInput("attack port must be SWITCH:FROM, got '" + std::string(port) + "'");
    }
    const auto node = sc.find_node(port.substr(0, colon));
    const auto from = sc.find_node(port.substr(colon + 1));
    if (!node || !from || !sc.find_link(*from, *node)) {
        throw InvalidInput("no ingress link for attack port '" + std::string(port) + "'");
    }
    a.node = *node;
    a.port = *sc.find_link(*from, *node);
    a.startup = parse_duration(parts[2]);
    a.frame_count = parse_duration(parts[3]);
    if (parts.size() == 5) {
        a.delay = parse_duration(parts[4]);
    } else if (a.type == AttackType::Delay) {
        throw InvalidInput("delay attack needs a delay time");
    }
    return a;
}

Deployment make_deployment(const Scenario& sc, const Schedule& schedule)
{
    Deployment d{schedule, build_shaper_offset_table(sc, schedule), {}};
    for (LinkIndex l = 0; l < sc.links.size(); ++l) {
        d.gcls.push_back(build_gcl(sc, schedule, l));
    }
    return d;
}

SimConfig make_sim_config(const Scenario& sc, const Schedule& schedule, EgressMode egress)
{
    SimConfig c;
    c.scenario = sc;
    c.deployment = make_deployment(sc, schedule);
    c.egress = egress;
    return c;
}

std::optional<Nanos> FrameRecord::e2e() const
{
    if (!received) {
        return std::nullopt;
    }
    return *received - send;
}

ShaperDecision shaper_admit(const ShaperRow& row, Nanos period, bool holding, Nanos now)
{
    ShaperDecision d;
    d.discard_older = holding;
    d.current_offset = now % row.cycle;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(d.current_offset / period), row.offsets.size() - 1);
    d.intended = row.offsets[k];
    if (d.intended < d.current_offset) {
        d.action = ShaperAction::DiscardTimeout;
        return d;
    }
    d.eligibility = now - d.current_offset + d.intended;
    return d;
}

AttackVerdict attack_meter(const AttackConfig& cfg, AttackMeterState& state, StreamIndex s, Nanos now)
{
    AttackVerdict v;
    const bool candidate = now >= cfg.startup && (!cfg.stream || *cfg.stream == s);
    if (candidate && state.matched < cfg.frame_count) {
        ++state.matched;
        v.action = cfg.type == AttackType::Drop ? AttackAction::Drop : AttackAction::Delay;
    }
    if (v.action == AttackAction::Drop) {
        v.release = now;
        return v;
    }
    const Nanos want = v.action == AttackAction::Delay ? now + cfg.delay : now;
    v.release = std::max(want, state.line_free);
    state.line_free = v.release;
    return v;
}

namespace {

class MetricsAccumulator {
public:
    explicit MetricsAccumulator(const Scenario& sc) : sc_(&sc), sum_(sc.streams.size(), 0.0)
    {
        for (const auto& st : sc.streams) {
            StreamMetrics m;
            m.stream = st.id;
            m_.push_back(std::move(m));
        }
    }

    void add(const FrameRecord& r)
    {
        StreamMetrics& m = m_.at(r.stream);
        ++m.sent;
        switch (r.disposition) {
        case Disposition::Delivered: {
            ++m.delivered;
            const Nanos e = *r.e2e();
            m.e2e_max = m.e2e_max ? std::max(*m.e2e_max, e) : e;
            m.e2e_min = m.e2e_min ? std::min(*m.e2e_min, e) : e;
            sum_[r.stream] += static_cast<double>(e);
            if (e > sc_->streams[r.stream].e2e_deadline) {
                ++m.deadline_violations;
            }
            break;
        }
        case Disposition::AttackDropped:
            ++m.attack_dropped;
            break;
        case Disposition::TimeoutDiscarded:
            ++m.timeout_discarded;
            break;
        case Disposition::Displaced:
            ++m.displaced;
            break;
        case Disposition::Pending:
            ++m.pending;
            break;
        }
    }

    std::vector<StreamMetrics> finish() const
    {
        auto out = m_;
        for (StreamIndex s = 0; s < out.size(); ++s) {
            StreamMetrics& m = out[s];
            if (m.delivered > 0) {
                m.e2e_mean = sum_[s] / static_cast<double>(m.delivered);
                m.jitter = *m.e2e_max - *m.e2e_min;
                m.jitter_violation = *m.jitter > sc_->streams[s].jitter_req;
            }
        }
        return out;
    }

private:
    const Scenario* sc_;
    std::vector<StreamMetrics> m_;
    std::vector<double> sum_;
};

enum class EventKind { Send, TxDone, Arrive, Ready, Release, Wake };

struct Event {
    Nanos time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Send;
    std::size_t a = 0;
    std::size_t b = 0;

    bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
};

enum class PortKind { Talker, Tas, TtUbs };

struct Port {
    PortKind kind = PortKind::Talker;
    Nanos busy_until = 0;
    std::array<std::deque<std::size_t>, kGateCount> queues;
    std::optional<Nanos> wake_at;
};

struct FrameState {
    FrameRecord rec;
    std::size_t hop = 0; // hop whose link the frame is on or queued for
};

struct ShaperState {
    std::optional<std::size_t> held;
};

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

class Simulator {
public:
    explicit Simulator(const SimConfig& cfg) : cfg_(cfg), sc_(cfg.scenario), dep_(cfg.deployment), acc_(sc_) {}

    SimReport run()
    {
        check_config();
        setup();
        if (cfg_.trace != nullptr) {
            write_trace_header(*cfg_.trace);
        }
        const Nanos cutoff = 2 * cfg_.duration + 1'000 * kNsPerMs;
        while (!events_.empty()) {
            const Event e = events_.top();
            if (e.time > cutoff) {
                break;
            }
            events_.pop();
            now_ = e.time;
            ++report_.events;
            dispatch(e);
        }
        std::vector<std::size_t> left;
        for (const auto& [id, f] : frames_) {
            left.push_back(id);
        }
        std::sort(left.begin(), left.end());
        for (std::size_t id : left) {
            finish(id, Disposition::Pending, false);
        }
        if (cfg_.keep_records) {
            std::sort(report_.records.begin(), report_.records.end(), [](const FrameRecord& x, const FrameRecord& y) {
                return std::tie(x.stream, x.instance) < std::tie(y.stream, y.instance);
            });
        }
        report_.metrics = acc_.finish();
        report_.trace_hash = hash_;
        report_.end_time = now_;
        return std::move(report_);
    }

private:
    void check_config() const
    {
        require_valid(sc_);
        const Schedule& sched = dep_.schedule;
        if (sched.offsets.size() != sc_.streams.size() || !sched.complete()) {
            throw InvalidInput("deployment schedule does not cover the scenario");
        }
        const auto violations = validate_schedule(sc_, sched, Mode::NFIC);
        if (!violations.empty()) {
            throw InvalidInput("deployment schedule violates " + violations.front().constraint.label);
        }
        if (dep_.gcls.size() != sc_.links.size()) {
            throw InvalidInput("deployment needs one gate control list per link");
        }
        for (StreamIndex s = 0; s < sc_.streams.size(); ++s) {
            for (std::size_t h = 0; h < sc_.streams[s].route.size(); ++h) {
                if (dep_.table.find(s, h) == nullptr) {
                    throw InvalidInput("shaper table lacks " + sc_.streams[s].id + " hop " + std::to_string(h));
                }
            }
        }
        std::vector<Nanos> periods;
        for (const auto& st : sc_.streams) {
            periods.push_back(st.period);
        }
        if (!periods.empty() && cfg_.duration < hyper_period(periods)) {
            throw InvalidInput("simulation must cover at least one hyper-period");
        }
        for (const auto& a : cfg_.faults) {
            if (a.port >= sc_.links.size() || sc_.links[a.port].dst != a.node || !sc_.is_switch(a.node)) {
                throw InvalidInput("attack port is not an ingress of a switch");
            }
            if (a.frame_count < 0 || a.delay < 0) {
                throw InvalidInput("attack counts and delays must be non-negative");
            }
        }
        for (const auto& [name, mode] : cfg_.egress_by_switch) {
            const auto n = sc_.find_node(name);
            if (!n || !sc_.is_switch(*n)) {
                throw InvalidInput("egress mode given for unknown switch '" + name + "'");
            }
        }
    }

    void setup()
    {
        ports_.resize(sc_.links.size());
        for (LinkIndex l = 0; l < sc_.links.size(); ++l) {
            const NodeIndex src = sc_.links[l].src;
            if (!sc_.is_switch(src)) {
                ports_[l].kind = PortKind::Talker;
                continue;
            }
            EgressMode m = cfg_.egress;
            if (auto it = cfg_.egress_by_switch.find(sc_.nodes[src].id); it != cfg_.egress_by_switch.end()) {
                m = it->second;
            }
            ports_[l].kind = m == EgressMode::Tas ? PortKind::Tas : PortKind::TtUbs;
        }
        shapers_.resize(dep_.table.rows.size());
        meters_.resize(cfg_.faults.size());
        for (StreamIndex s = 0; s < sc_.streams.size(); ++s) {
            const Stream& st = sc_.streams[s];
            std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                              static_cast<std::uint32_t>(s)};
            rngs_.emplace_back(seq);
            dists_.emplace_back(st.payload_min, st.payload_max);
            next_instance_.push_back(0);
            talker_row_.push_back(dep_.table.find(s, 0));
            schedule_send(s);
        }
    }

    void push(Nanos t, EventKind k, std::size_t a, std::size_t b = 0)
    {
        events_.push(Event{t, seq_++, k, a, b});
    }

    Nanos send_time(StreamIndex s, std::int64_t n) const
    {
        const ShaperRow& r = *talker_row_[s];
        const auto slots = static_cast<std::int64_t>(r.offsets.size());
        return (n / slots) * r.cycle + r.offsets[static_cast<std::size_t>(n % slots)];
    }

    void schedule_send(StreamIndex s)
    {
        const Nanos t = send_time(s, next_instance_[s]);
        if (t < cfg_.duration) {
            push(t, EventKind::Send, s);
        }
    }

    void dispatch(const Event& e)
    {
        switch (e.kind) {
        case EventKind::Send:
            on_send(e.a);
            break;
        case EventKind::TxDone:
            try_transmit(e.a);
            break;
        case EventKind::Arrive:
            on_arrive(e.a, e.b);
            break;
        case EventKind::Ready:
            on_ready(e.a);
            break;
        case EventKind::Release:
            on_release(e.a, e.b);
            break;
        case EventKind::Wake:
            if (ports_[e.a].wake_at == e.time) {
                ports_[e.a].wake_at.reset();
            }
            try_transmit(e.a);
            break;
        }
    }

    void on_send(StreamIndex s)
    {
        const Stream& st = sc_.streams[s];
        const std::int64_t n = next_instance_[s]++;
        const std::size_t id = next_frame_++;
        FrameState& f = frames_[id];
        f.rec.stream = s;
        f.rec.instance = n;
        f.rec.slot = n % static_cast<std::int64_t>(talker_row_[s]->offsets.size());
        f.rec.payload = dists_[s](rngs_[s]);
        f.rec.hops.push_back(HopTiming{now_, now_, now_, 0, 0});
        schedule_send(s);
        enqueue(id, st.route[0], dep_.schedule.queues[s][0]);
    }

    void enqueue(std::size_t id, LinkIndex l, int q)
    {
        ports_[l].queues[static_cast<std::size_t>(q)].push_back(id);
        try_transmit(l);
    }

    Nanos open_until(const GateControlList& g, std::size_t q, Nanos t) const
    {
        Nanos end = g.interval_end(t);
        const Nanos limit = t + g.cycle;
        while (end < limit) {
            if (!g.state_at(end)[q]) {
                return end;
            }
            end = g.interval_end(end);
        }
        return std::numeric_limits<Nanos>::max();
    }

    bool startable(const Port& p, LinkIndex l, std::size_t q, std::size_t id) const
    {
        if (p.kind != PortKind::Tas) {
            return true;
        }
        const GateControlList& g = dep_.gcls[l];
        if (!g.state_at(now_)[q]) {
            return false;
        }
        if (cfg_.gating == TasGating::StartGated) {
            return true;
        }
        const Nanos dur = bytes_to_duration(frames_.at(id).rec.payload, sc_.links[l].rate_bps);
        return now_ + dur <= open_until(g, q, now_);
    }

    void try_transmit(LinkIndex l)
    {
        Port& p = ports_[l];
        if (p.busy_until > now_) {
            return;
        }
        bool waiting = false;
        for (std::size_t q = kGateCount; q-- > 0;) {
            if (p.queues[q].empty()) {
                continue;
            }
            const std::size_t id = p.queues[q].front();
            if (!startable(p, l, q, id)) {
                waiting = true;
                continue;
            }
            p.queues[q].pop_front();
            start_tx(id, l);
            return;
        }
        if (waiting && p.kind == PortKind::Tas) {
            const Nanos at = dep_.gcls[l].interval_end(now_);
            if (!p.wake_at || *p.wake_at != at) {
                p.wake_at = at;
                push(at, EventKind::Wake, l);
            }
        }
    }

    void start_tx(std::size_t id, LinkIndex l)
    {
        FrameState& f = frames_.at(id);
        const Link& link = sc_.links[l];
        HopTiming& h = f.rec.hops.back();
        h.tx_start = now_;
        h.tx_end = now_ + bytes_to_duration(f.rec.payload, link.rate_bps);
        if (f.hop == 0) {
            f.rec.send = now_;
        }
        ports_[l].busy_until = h.tx_end;
        trace(link.src, f.hop == 0 ? "send" : "tx_start", f.rec, Disposition::Pending, false);
        push(h.tx_end, EventKind::TxDone, l);
        push(h.tx_end + link.prop_delay, EventKind::Arrive, id, l);
    }

    void on_arrive(std::size_t id, LinkIndex l)
    {
        FrameState& f = frames_.at(id);
        const Stream& st = sc_.streams[f.rec.stream];
        const NodeIndex node = sc_.links[l].dst;
        if (f.hop + 1 == st.route.size()) {
            f.rec.received = now_;
            finish(id, Disposition::Delivered, true);
            return;
        }
        ++f.hop;
        f.rec.hops.push_back(HopTiming{now_, 0, 0, 0, 0});
        trace(node, "arrive", f.rec, Disposition::Pending, false);
        Nanos release = now_;
        for (std::size_t i = 0; i < cfg_.faults.size(); ++i) {
            const AttackConfig& a = cfg_.faults[i];
            if (a.node != node || a.port != l) {
                continue;
            }
            const AttackVerdict v = attack_meter(a, meters_[i], f.rec.stream, release);
            if (v.action == AttackAction::Drop) {
                finish(id, Disposition::AttackDropped, true);
                return;
            }
            if (v.action == AttackAction::Delay) {
                trace(node, "attack_delay", f.rec, Disposition::Pending, false);
            }
            release = v.release;
        }
        f.rec.hops.back().ready = release + sc_.links[l].proc_delay;
        push(f.rec.hops.back().ready, EventKind::Ready, id);
    }

    void on_ready(std::size_t id)
    {
        FrameState& f = frames_.at(id);
        const StreamIndex s = f.rec.stream;
        const LinkIndex egress = sc_.streams[s].route[f.hop];
        const NodeIndex node = sc_.links[egress].src;
        const int q = dep_.schedule.queues[s][f.hop];
        if (ports_[egress].kind != PortKind::TtUbs) {
            f.rec.hops.back().eligible = now_;
            trace(node, "enqueue", f.rec, Disposition::Pending, false);
            enqueue(id, egress, q);
            return;
        }
        const LinkIndex ingress = sc_.streams[s].route[f.hop - 1];
        const ShaperRow* row = dep_.table.match(node, ingress, s);
        const auto r = static_cast<std::size_t>(row - dep_.table.rows.data());
        ShaperState& sh = shapers_[r];
        const ShaperDecision d = shaper_admit(*row, sc_.streams[s].period, sh.held.has_value(), now_);
        if (d.discard_older) {
            const std::size_t old = *sh.held;
            sh.held.reset();
            finish(old, Disposition::Displaced, true);
        }
        if (d.action == ShaperAction::DiscardTimeout) {
            finish(id, Disposition::TimeoutDiscarded, true);
            return;
        }
        sh.held = id;
        report_.max_shaped_occupancy = std::max<std::size_t>(report_.max_shaped_occupancy, 1);
        trace(node, "hold", f.rec, Disposition::Pending, false);
        push(d.eligibility, EventKind::Release, id, r);
    }

    void on_release(std::size_t id, std::size_t r)
    {
        ShaperState& sh = shapers_[r];
        if (sh.held != id) {
            return;
        }
        sh.held.reset();
        FrameState& f = frames_.at(id);
        f.rec.hops.back().eligible = now_;
        const ShaperRow& row = dep_.table.rows[r];
        trace(row.node, "release", f.rec, Disposition::Pending, false);
        enqueue(id, row.egress, row.queue);
    }

    void finish(std::size_t id, Disposition d, bool traced)
    {
        auto it = frames_.find(id);
        FrameRecord rec = std::move(it->second.rec);
        frames_.erase(it);
        rec.disposition = d;
        const StreamIndex s = rec.stream;
        const std::size_t hop = rec.hops.size() - 1;
        const LinkIndex l = sc_.streams[s].route[hop];
        const NodeIndex node = d == Disposition::Delivered ? sc_.links[l].dst
                               : hop == 0                  ? sc_.links[l].src
                                                           : sc_.links[sc_.streams[s].route[hop - 1]].dst;
        if (traced) {
            const char* ev = d == Disposition::Delivered       ? "deliver"
                             : d == Disposition::AttackDropped ? "attack_drop"
                                                               : "discard";
            trace(node, ev, rec, d, true);
        }
        if (d != Disposition::Delivered) {
            report_.discards.push_back(DiscardEntry{now_, node, s, rec.instance, d});
        }
        acc_.add(rec);
        if (cfg_.keep_records) {
            report_.records.push_back(std::move(rec));
        }
    }

    void trace(NodeIndex node, const char* event, const FrameRecord& rec, Disposition d, bool final)
    {
        char buf[256];
        const std::string_view disp = final ? to_string(d) : std::string_view("");
        const int n = std::snprintf(buf, sizeof buf, "%lld,%s,%s,%s,%lld,%.*s\n", static_cast<long long>(now_),
                                    sc_.nodes[node].id.c_str(), event, sc_.streams[rec.stream].id.c_str(),
                                    static_cast<long long>(rec.instance), static_cast<int>(disp.size()), disp.data());
        const auto len = static_cast<std::size_t>(std::min<int>(n, static_cast<int>(sizeof buf) - 1));
        for (std::size_t i = 0; i < len; ++i) {
            hash_ = (hash_ ^ static_cast<unsigned char>(buf[i])) * kFnvPrime;
        }
        ++report_.trace_rows;
        if (cfg_.trace != nullptr) {
            cfg_.trace->write(buf, static_cast<std::streamsize>(len));
        }
    }

    const SimConfig& cfg_;
    const Scenario& sc_;
    const Deployment& dep_;
    MetricsAccumulator acc_;
    SimReport report_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::uint64_t seq_ = 0;
    Nanos now_ = 0;
    std::uint64_t hash_ = kFnvOffset;
    std::vector<Port> ports_;
    std::vector<ShaperState> shapers_;
    std::vector<AttackMeterState> meters_;
    std::vector<std::mt19937_64> rngs_;
    std::vector<std::uniform_int_distribution<std::int64_t>> dists_;
    std::vector<std::int64_t> next_instance_;
    std::vector<const ShaperRow*> talker_row_;
    std::unordered_map<std::size_t, FrameState> frames_;
    std::size_t next_frame_ = 0;
};

} // namespace

SimReport run_simulation(const SimConfig& config)
{
    return Simulator(config).run();
}

std::vector<StreamMetrics> collect_metrics(const Scenario& sc, const std::vector<FrameRecord>& records)
{
    MetricsAccumulator acc(sc);
    for (const auto& r : records) {
        acc.add(r);
    }
    return acc.finish();
}

void write_trace_header(std::ostream& os)
{
    os << "time_ns,node,event,stream,slot,disposition\n";
}

void write_metrics_csv(std::ostream& os, const std::vector<StreamMetrics>& metrics)
{
    os << "stream,sent,delivered,attack_dropped,timeout_discarded,displaced,pending,e2e_max_ns,e2e_min_ns,"
          "e2e_mean_ns,jitter_ns,deadline_violations,jitter_violation\n";
    auto opt = [](const std::optional<Nanos>& v) { return v ? std::to_string(*v) : std::string("NA"); };
    for (const auto& m : metrics) {
        char mean[32] = "NA";
        if (m.e2e_mean) {
            std::snprintf(mean, sizeof mean, "%.1f", *m.e2e_mean);
        }
        os << m.stream << ',' << m.sent << ',' << m.delivered << ',' << m.attack_dropped << ','
           << m.timeout_discarded << ',' << m.displaced << ',' << m.pending << ',' << opt(m.e2e_max) << ','
           << opt(m.e2e_min) << ',' << mean << ',' << opt(m.jitter) << ',' << m.deadline_violations << ','
           << (m.jitter_violation ? 1 : 0) << '\n';
    }
}

} // namespace ttubs
