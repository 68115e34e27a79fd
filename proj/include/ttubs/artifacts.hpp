#pragma once

#include "ttubs/net_model.hpp"
#include "ttubs/schedule.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttubs {

class InvalidSchedule : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ShaperRow {
    NodeIndex node = 0;   // switch, or the talker for its own send row
    LinkIndex egress = 0;
    std::optional<LinkIndex> ingress; // empty on talker rows
    StreamIndex stream = 0;
    std::size_t hop = 0;
    int queue = kTtQueue;
    std::vector<Nanos> offsets; // ascending, within [0, cycle)
    Nanos cycle = 0;
};

struct ShaperOffsetTable {
    std::vector<ShaperRow> rows;

    [[nodiscard]] const ShaperRow* find(StreamIndex s, std::size_t hop) const;
    [[nodiscard]] const ShaperRow& at(StreamIndex s, std::size_t hop) const;
    /// Switch row keyed by the shaped queue: frames of `s` entering `node` via `ingress`.
    [[nodiscard]] const ShaperRow* match(NodeIndex node, LinkIndex ingress, StreamIndex s) const;
};

ShaperOffsetTable build_shaper_offset_table(const Scenario& sc, const Schedule& schedule);
Schedule schedule_from_table(const Scenario& sc, const ShaperOffsetTable& table);

using GateVector = std::array<bool, kGateCount>;

struct GateInterval {
    Nanos start = 0;
    Nanos end = 0;
    GateVector open{};
};

struct GateControlList {
    LinkIndex link = 0;
    Nanos cycle = 0;
    std::vector<GateInterval> intervals;
    std::set<int> tt_queues;

    /// Interval containing t mod cycle.
    [[nodiscard]] const GateInterval& interval_at(Nanos t) const;
    [[nodiscard]] GateVector state_at(Nanos t) const { return interval_at(t).open; }
    /// Absolute time at which the interval containing t ends.
    [[nodiscard]] Nanos interval_end(Nanos t) const;
};

GateVector gcl_gate_state(const GateControlList& gcl, Nanos t);

/// Throws InvalidSchedule if two frame windows on the link overlap.
GateControlList build_gcl(const Scenario& sc, const Schedule& schedule, LinkIndex egress);

struct FrameWindow {
    Nanos start = 0;
    Nanos duration = 0;
    int queue = 0;
    bool operator==(const FrameWindow&) const = default;
};

/// Windows where exactly one TT queue is open, in order.
std::vector<FrameWindow> windows_from_gcl(const GateControlList& gcl);

/// (E_last - E_0) + wire time of `payload` (+ last-link propagation) for one slot.
Nanos e2e_closed_form(const Scenario& sc, const ShaperOffsetTable& table, StreamIndex s, std::int64_t slot,
                      std::int64_t payload);

struct E2EBounds {
    Nanos max = 0;
    Nanos min = 0;
    Nanos jitter = 0;
};

E2EBounds e2e_bounds_and_jitter(const Scenario& sc, const ShaperOffsetTable& table, StreamIndex s);

struct HopDelay {
    Nanos d_sp = 0; // shaped queue
    Nanos d_f = 0;  // forwarding
    Nanos d_sr = 0; // shared queue
    Nanos d_t = 0;  // transmission
    Nanos d_p = 0;  // propagation
    [[nodiscard]] Nanos total() const { return d_sp + d_f + d_sr + d_t + d_p; }
    bool operator==(const HopDelay&) const = default;
};

struct LatencyBreakdown {
    std::vector<HopDelay> hops;
    [[nodiscard]] Nanos total() const;
};

/// Measured instants of one frame on one hop. `arrive` is reception end at the
/// sending node (the talker's send time on hop 0).
struct HopTiming {
    Nanos arrive = 0;
    Nanos ready = 0;    // after forwarding
    Nanos eligible = 0; // released by the shaper
    Nanos tx_start = 0;
    Nanos tx_end = 0;
};

LatencyBreakdown closed_form_breakdown(const Scenario& sc, const ShaperOffsetTable& table, StreamIndex s,
                                       std::int64_t slot, std::int64_t payload);
/// `received` is reception end at the listener.
LatencyBreakdown measured_breakdown(const Scenario& sc, StreamIndex s, const std::vector<HopTiming>& hops,
                                    Nanos received);

void write_shaper_table_csv(std::ostream& os, const Scenario& sc, const ShaperOffsetTable& t);
void write_gcl_csv(std::ostream& os, const GateControlList& g);
std::string shaper_table_to_json(const Scenario& sc, const ShaperOffsetTable& t);
std::string gcl_to_json(const Scenario& sc, const GateControlList& g);

/// "12.345"
std::string format_us(Nanos ns);

} // namespace ttubs
