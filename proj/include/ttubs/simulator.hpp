#pragma once

#include "ttubs/artifacts.hpp"
#include "ttubs/net_model.hpp"
#include "ttubs/schedule.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ttubs {

enum class EgressMode { Tas, TtUbs };
std::string_view to_string(EgressMode m);
EgressMode parse_egress_mode(std::string_view text);

/// LengthAware starts a frame only if it finishes before its gate closes;
/// StartGated only needs the gate open at the start. Neither aborts a frame.
enum class TasGating { LengthAware, StartGated };

enum class AttackType { Drop = 1, Delay = 2 };

struct AttackConfig {
    NodeIndex node = 0;
    LinkIndex port = 0; // ingress link
    AttackType type = AttackType::Drop;
    Nanos startup = 0;
    std::int64_t frame_count = 0;
    Nanos delay = 0;
    std::optional<StreamIndex> stream; // only frames of this stream are counted
};

/// "drop|delay,SWITCH:FROM[/STREAM],START,COUNT[,DELAY]" with times like 21us.
AttackConfig parse_attack(const Scenario& sc, std::string_view text);
/// "10s", "21us", "500ns", "3ms" or a bare ns count.
Nanos parse_duration(std::string_view text);

struct Deployment {
    Schedule schedule;
    ShaperOffsetTable table;
    std::vector<GateControlList> gcls; // indexed by link
};

Deployment make_deployment(const Scenario& sc, const Schedule& schedule);

struct SimConfig {
    Scenario scenario;
    Deployment deployment;
    EgressMode egress = EgressMode::TtUbs;
    std::map<std::string, EgressMode> egress_by_switch;
    TasGating gating = TasGating::LengthAware;
    std::vector<AttackConfig> faults;
    std::uint64_t seed = 1;
    Nanos duration = 10'000 * kNsPerMs;
    bool keep_records = false;
    std::ostream* trace = nullptr;
};

SimConfig make_sim_config(const Scenario& sc, const Schedule& schedule, EgressMode egress);

enum class Disposition { Delivered, AttackDropped, TimeoutDiscarded, Displaced, Pending };
std::string_view to_string(Disposition d);

struct FrameRecord {
    StreamIndex stream = 0;
    std::int64_t instance = 0; // frames of the stream sent before this one
    std::int64_t slot = 0;     // slot within the stream's cycle
    std::int64_t payload = 0;
    Nanos send = 0;
    std::vector<HopTiming> hops; // hops entered so far
    std::optional<Nanos> received;
    Disposition disposition = Disposition::Pending;

    [[nodiscard]] std::optional<Nanos> e2e() const;
};

struct DiscardEntry {
    Nanos time = 0;
    NodeIndex node = 0;
    StreamIndex stream = 0;
    std::int64_t instance = 0;
    Disposition disposition = Disposition::Pending;
};

struct StreamMetrics {
    std::string stream;
    std::int64_t sent = 0;
    std::int64_t delivered = 0;
    std::int64_t attack_dropped = 0;
    std::int64_t timeout_discarded = 0;
    std::int64_t displaced = 0;
    std::int64_t pending = 0;
    std::optional<Nanos> e2e_max;
    std::optional<Nanos> e2e_min;
    std::optional<double> e2e_mean;
    std::optional<Nanos> jitter;
    std::int64_t deadline_violations = 0;
    bool jitter_violation = false;

    [[nodiscard]] bool meets_requirements() const { return deadline_violations == 0 && !jitter_violation; }
    bool operator==(const StreamMetrics&) const = default;
};

struct SimReport {
    std::vector<StreamMetrics> metrics;
    std::vector<FrameRecord> records; // filled when keep_records is set
    std::vector<DiscardEntry> discards;
    std::uint64_t trace_hash = 0;
    std::int64_t trace_rows = 0;
    std::int64_t events = 0;
    std::size_t max_shaped_occupancy = 0;
    Nanos end_time = 0;
};

/// Throws InvalidInput when the deployment does not fit the scenario.
SimReport run_simulation(const SimConfig& config);

enum class ShaperAction { Hold, DiscardTimeout };

struct ShaperDecision {
    bool discard_older = false;
    ShaperAction action = ShaperAction::Hold;
    Nanos current_offset = 0;
    Nanos intended = 0;
    Nanos eligibility = 0; // absolute release time when held
};

ShaperDecision shaper_admit(const ShaperRow& row, Nanos period, bool holding, Nanos now);

enum class AttackAction { Pass, Drop, Delay };

struct AttackMeterState {
    std::int64_t matched = 0;
    Nanos line_free = 0; // frames leave the meter in arrival order
};

struct AttackVerdict {
    AttackAction action = AttackAction::Pass;
    Nanos release = 0;
};

AttackVerdict attack_meter(const AttackConfig& cfg, AttackMeterState& state, StreamIndex s, Nanos now);

std::vector<StreamMetrics> collect_metrics(const Scenario& sc, const std::vector<FrameRecord>& records);

void write_trace_header(std::ostream& os);
void write_metrics_csv(std::ostream& os, const std::vector<StreamMetrics>& metrics);

} // namespace ttubs
