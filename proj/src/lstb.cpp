#include "ttubs/lstb.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

namespace ttubs {

std::string_view to_string(LstbStatus s)
{
    switch (s) {
    case LstbStatus::Sat:
        return "sat";
    case LstbStatus::Infeasible:
        return "infeasible";
    case LstbStatus::LimitExceeded:
        return "limit";
    }
    return "?";
}

SearchState::SearchState(const Scenario& sc, Mode mode) : sc_(&sc), mode_(mode)
{
    const auto horizons = stream_horizons(sc);
    std::vector<StreamIndex> streams(sc.streams.size());
    for (StreamIndex s = 0; s < streams.size(); ++s) {
        streams[s] = s;
    }
    std::stable_sort(streams.begin(), streams.end(), [&](StreamIndex a, StreamIndex b) {
        const Stream& x = sc.streams[a];
        const Stream& y = sc.streams[b];
        if (x.period != y.period) {
            return x.period < y.period;
        }
        return x.id < y.id;
    });

    index_.resize(sc.streams.size());
    queue_.resize(sc.streams.size());
    queue_owner_.resize(sc.streams.size());
    on_link_.resize(sc.links.size());
    for (StreamIndex s : streams) {
        const Stream& st = sc.streams[s];
        const std::int64_t slots = horizons[s] / st.period;
        index_[s].resize(st.route.size());
        queue_[s].assign(st.route.size(), std::nullopt);
        queue_owner_[s].assign(st.route.size(), 0);
        for (std::size_t h = 0; h < st.route.size(); ++h) {
            const Nanos dur = frame_duration(sc, s, st.route[h]);
            for (std::int64_t k = 0; k < slots; ++k) {
                index_[s][h].push_back(order_.size());
                on_link_[st.route[h]].push_back(order_.size());
                order_.push_back({s, h, k, st.route[h], dur});
            }
        }
    }
    offset_.assign(order_.size(), std::nullopt);
    floor.assign(order_.size(), 0);
    conflicts.assign(order_.size(), {});
}

std::size_t SearchState::index_of(StreamIndex s, std::size_t hop, std::int64_t slot) const
{
    return index_.at(s).at(hop).at(static_cast<std::size_t>(slot));
}

Nanos SearchState::phi(std::size_t idx) const
{
    const FrameRef& f = order_.at(idx);
    return offset_.at(idx).value() - f.slot * sc_->streams[f.stream].period;
}

int SearchState::queue_for(StreamIndex s, std::size_t hop) const
{
    if (auto q = queue_.at(s).at(hop)) {
        return *q;
    }
    const LinkIndex l = sc_->streams[s].route[hop];
    const Link& link = sc_->links[l];
    if (mode_ == Mode::NFIC || hop == 0) {
        return nfic_queue(link);
    }
    std::vector<int> load(static_cast<std::size_t>(link.queue_count), 0);
    for (std::size_t idx : on_link_[l]) {
        const FrameRef& g = order_[idx];
        if (g.stream == s || g.slot != 0) {
            continue;
        }
        if (auto q = queue_[g.stream][g.hop]) {
            ++load[static_cast<std::size_t>(*q)];
        }
    }
    for (std::size_t q = 0; q < load.size(); ++q) {
        if (load[q] == 0) {
            return static_cast<int>(q);
        }
    }
    return static_cast<int>(std::min_element(load.begin(), load.end()) - load.begin());
}

void SearchState::assign(std::size_t idx, Nanos phi)
{
    const FrameRef& f = order_.at(idx);
    offset_[idx] = f.slot * sc_->streams[f.stream].period + phi;
    if (!queue_[f.stream][f.hop]) {
        queue_[f.stream][f.hop] = queue_for(f.stream, f.hop);
        queue_owner_[f.stream][f.hop] = idx;
    }
}

void SearchState::unassign(std::size_t idx)
{
    const FrameRef& f = order_.at(idx);
    offset_[idx].reset();
    if (queue_[f.stream][f.hop] && queue_owner_[f.stream][f.hop] == idx) {
        queue_[f.stream][f.hop].reset();
    }
}

Schedule SearchState::to_schedule() const
{
    Schedule out = Schedule::empty_for(*sc_);
    for (std::size_t i = 0; i < order_.size(); ++i) {
        if (offset_[i]) {
            out.set(order_[i].stream, order_[i].hop, order_[i].slot, *offset_[i]);
        }
    }
    for (StreamIndex s = 0; s < queue_.size(); ++s) {
        for (std::size_t h = 0; h < queue_[s].size(); ++h) {
            if (queue_[s][h]) {
                out.queues[s][h] = *queue_[s][h];
            }
        }
    }
    return out;
}

namespace {

/// Time at which frame `idx` is available in the queue of its link.
Nanos arrival(const SearchState& st, std::size_t idx)
{
    const FrameRef& f = st.order()[idx];
    if (f.hop == 0) {
        return *st.offset(idx);
    }
    const Scenario& sc = st.scenario();
    const std::size_t up = st.index_of(f.stream, f.hop - 1, f.slot);
    const FrameRef& u = st.order()[up];
    return *st.offset(up) + u.duration + sc.links[u.link].prop_delay + sc.sync_precision;
}

struct Blocked {
    Nanos lo;
    Nanos hi;
    std::size_t by;
};

} // namespace

Probe next_feasible_offset(const SearchState& st, std::size_t idx)
{
    const Scenario& sc = st.scenario();
    const FrameRef& f = st.order().at(idx);
    const Stream& stream = sc.streams[f.stream];
    const Nanos base = f.slot * stream.period;
    const bool last = f.hop + 1 == stream.route.size();

    Probe out;
    Nanos lo = st.floor.at(idx);
    Nanos hi = stream.period - f.duration;
    if (sc.pin_talker_offsets && f.hop == 0) {
        hi = std::min<Nanos>(hi, 0);
    }

    std::optional<std::size_t> up;
    if (f.hop > 0) {
        up = st.index_of(f.stream, f.hop - 1, f.slot);
        const FrameRef& u = st.order()[*up];
        const Link& ul = sc.links[u.link];
        const Nanos bound = st.phi(*up) + u.duration + ul.prop_delay + ul.proc_delay + sc.sync_precision;
        if (bound >= lo) {
            lo = bound;
            out.conflicts.insert(*up);
        }
    }
    if (last) {
        if (f.hop == 0) {
            if (stream.e2e_deadline < f.duration) {
                hi = -1;
            }
        } else {
            const std::size_t first = st.index_of(f.stream, 0, f.slot);
            const Nanos bound = st.phi(first) + stream.e2e_deadline - f.duration;
            if (bound < hi) {
                hi = bound;
                out.conflicts.insert(first);
            }
        }
    }

    std::vector<Blocked> blocked;
    const bool isolate = st.mode() == Mode::WA && f.hop > 0;
    const int my_queue = st.queue_for(f.stream, f.hop);
    Nanos arr_f = 0;
    if (isolate) {
        const FrameRef& u = st.order()[*up];
        arr_f = *st.offset(*up) + u.duration + sc.links[u.link].prop_delay + sc.sync_precision;
    }
    for (std::size_t g : st.frames_on(f.link)) {
        const FrameRef& gf = st.order()[g];
        if (gf.stream == f.stream) {
            continue;
        }
        const auto ag = st.offset(g);
        if (!ag) {
            continue;
        }
        blocked.push_back({*ag - f.duration - base, *ag + gf.duration - base, g});
        if (!isolate) {
            continue;
        }
        if (st.queue(gf.stream, gf.hop) != my_queue) {
            continue;
        }
        if (arr_f >= *ag) {
            continue;
        }
        const Nanos bound = arrival(st, g) - base;
        if (bound < hi) {
            hi = bound;
            out.conflicts.insert(g);
            out.conflicts.insert(*up);
            if (gf.hop > 0) {
                out.conflicts.insert(st.index_of(gf.stream, gf.hop - 1, gf.slot));
            }
        }
    }
    std::sort(blocked.begin(), blocked.end(), [](const Blocked& a, const Blocked& b) {
        return a.lo != b.lo ? a.lo < b.lo : a.by < b.by;
    });
    Nanos x = lo;
    for (const Blocked& b : blocked) {
        if (x > hi) {
            break;
        }
        if (b.lo < x && x < b.hi) {
            x = b.hi;
            out.conflicts.insert(b.by);
        }
    }
    if (x <= hi) {
        out.phi = x;
    }
    return out;
}

bool backjump(SearchState& st, const std::set<std::size_t>& found)
{
    const std::size_t cur = st.cursor;
    std::set<std::size_t> conf = st.conflicts.at(cur);
    conf.insert(found.begin(), found.end());
    conf.erase(conf.lower_bound(cur), conf.end());
    if (conf.empty()) {
        return false;
    }
    const std::size_t target = *conf.rbegin();
    conf.erase(target);
    const Nanos prev = st.phi(target);
    for (std::size_t i = cur; i > target; --i) {
        if (st.offset(i)) {
            st.unassign(i);
        }
        st.floor[i] = 0;
        st.conflicts[i].clear();
    }
    st.conflicts[target].insert(conf.begin(), conf.end());
    st.unassign(target);
    st.floor[target] = prev + 1;
    st.cursor = target;
    ++st.backjumps;
    return true;
}

LstbResult lstb_solve(const Scenario& sc, Mode mode, const LstbLimits& limits)
{
    require_valid(sc);
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    SearchState st(sc, mode);
    LstbResult out;
    std::int64_t steps = 0;
    while (st.cursor < st.order().size()) {
        if ((++steps & 0xff) == 0 && elapsed() > limits.max_seconds) {
            out.status = LstbStatus::LimitExceeded;
            break;
        }
        const Probe p = next_feasible_offset(st, st.cursor);
        if (p.phi) {
            st.assign(st.cursor, *p.phi);
            ++st.cursor;
            ++out.stats.placements;
            continue;
        }
        if (st.backjumps >= limits.max_backjumps) {
            out.status = LstbStatus::LimitExceeded;
            break;
        }
        if (!backjump(st, p.conflicts)) {
            out.status = LstbStatus::Infeasible;
            break;
        }
    }
    if (st.cursor == st.order().size()) {
        out.status = LstbStatus::Sat;
        out.schedule = st.to_schedule();
    }
    out.stats.backjumps = st.backjumps;
    out.stats.seconds = elapsed();
    return out;
}

void write_lstb_csv_header(std::ostream& os)
{
    os << "scenario,mode,status,backjumps,placements,seconds\n";
}

void write_lstb_csv_row(std::ostream& os, std::string_view scenario_id, Mode mode, const LstbResult& r)
{
    os << scenario_id << ',' << to_string(mode) << ',' << to_string(r.status) << ',' << r.stats.backjumps << ','
       << r.stats.placements << ',' << r.stats.seconds << '\n';
}

} // namespace ttubs
