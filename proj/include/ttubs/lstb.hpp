#pragma once

#include "ttubs/net_model.hpp"
#include "ttubs/schedule.hpp"

#include <iosfwd>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

namespace ttubs {

struct LstbLimits {
    std::int64_t max_backjumps = 10'000;
    double max_seconds = 60.0;
};

enum class LstbStatus { Sat, Infeasible, LimitExceeded };
std::string_view to_string(LstbStatus s);

struct LstbStats {
    std::int64_t backjumps = 0;
    std::int64_t placements = 0;
    double seconds = 0.0;
};

struct LstbResult {
    LstbStatus status = LstbStatus::Infeasible;
    std::optional<Schedule> schedule;
    LstbStats stats;
};

struct FrameRef {
    StreamIndex stream = 0;
    std::size_t hop = 0;
    std::int64_t slot = 0;
    LinkIndex link = 0;
    Nanos duration = 0;
};

/// Frames ordered by (period, stream id, hop, slot) with their partial assignment.
class SearchState {
public:
    SearchState(const Scenario& sc, Mode mode);

    [[nodiscard]] const Scenario& scenario() const { return *sc_; }
    [[nodiscard]] Mode mode() const { return mode_; }
    [[nodiscard]] const std::vector<FrameRef>& order() const { return order_; }
    [[nodiscard]] std::size_t index_of(StreamIndex s, std::size_t hop, std::int64_t slot) const;
    /// Order indices of the frames transmitted on `l`.
    [[nodiscard]] const std::vector<std::size_t>& frames_on(LinkIndex l) const { return on_link_.at(l); }

    /// Absolute offset within the horizon, if assigned.
    [[nodiscard]] std::optional<Nanos> offset(std::size_t idx) const { return offset_.at(idx); }
    /// Slot-relative offset of an assigned frame.
    [[nodiscard]] Nanos phi(std::size_t idx) const;
    [[nodiscard]] std::optional<int> queue(StreamIndex s, std::size_t hop) const { return queue_.at(s).at(hop); }
    /// Assigned queue, or the one the next placement would pick.
    [[nodiscard]] int queue_for(StreamIndex s, std::size_t hop) const;

    /// Places frame `idx` at slot-relative offset `phi`, choosing its queue on first use.
    void assign(std::size_t idx, Nanos phi);
    void unassign(std::size_t idx);

    std::size_t cursor = 0;
    std::vector<Nanos> floor;
    std::vector<std::set<std::size_t>> conflicts;
    std::int64_t backjumps = 0;

    [[nodiscard]] Schedule to_schedule() const;

private:
    const Scenario* sc_;
    Mode mode_;
    std::vector<FrameRef> order_;
    std::vector<std::vector<std::vector<std::size_t>>> index_; // [stream][hop][slot]
    std::vector<std::vector<std::size_t>> on_link_;
    std::vector<std::optional<Nanos>> offset_;
    std::vector<std::vector<std::optional<int>>> queue_;
    std::vector<std::vector<std::size_t>> queue_owner_; // order index that fixed the queue
};

struct Probe {
    std::optional<Nanos> phi;
    /// Assigned frames that blocked a candidate or supplied a bound.
    std::set<std::size_t> conflicts;
};

/// Smallest slot-relative offset for frame `idx` at or above its retry floor that
/// keeps every checked constraint against the assigned frames.
Probe next_feasible_offset(const SearchState& st, std::size_t idx);

/// Jumps back to the most recent frame in `conflicts` merged with the current
/// frame's own set. Returns false when there is nothing to jump to.
bool backjump(SearchState& st, const std::set<std::size_t>& conflicts);

/// WA runs the isolation check (FIC); NFIC skips it.
LstbResult lstb_solve(const Scenario& sc, Mode mode, const LstbLimits& limits = {});

void write_lstb_csv_header(std::ostream& os);
void write_lstb_csv_row(std::ostream& os, std::string_view scenario_id, Mode mode, const LstbResult& r);

} // namespace ttubs
