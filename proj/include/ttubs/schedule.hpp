#pragma once

#include "ttubs/net_model.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace ttubs {

/// WA keeps the frame isolation constraints (LS-TB calls this FIC); NFIC drops them.
enum class Mode { WA, NFIC };

constexpr int kTtQueue = 4;

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

/// TT queue used on `link` when isolation is not in effect.
int nfic_queue(const Link& link);

/// Offsets are absolute within the stream's horizon (slot * period + slot-relative phi).
struct Schedule {
    // [stream][hop][slot]
    std::vector<std::vector<std::vector<std::optional<Nanos>>>> offsets;
    // [stream][hop]
    std::vector<std::vector<int>> queues;

    /// Unassigned offsets, queues at the NFIC constant.
    static Schedule empty_for(const Scenario& sc);

    [[nodiscard]] std::optional<Nanos> offset(StreamIndex s, std::size_t hop, std::int64_t slot) const;
    [[nodiscard]] Nanos at(StreamIndex s, std::size_t hop, std::int64_t slot) const;
    [[nodiscard]] Nanos talker_offset(StreamIndex s, std::int64_t slot) const { return at(s, 0, slot); }
    [[nodiscard]] bool complete() const;
    void set(StreamIndex s, std::size_t hop, std::int64_t slot, Nanos absolute) { offsets.at(s).at(hop).at(slot) = absolute; }

    bool operator==(const Schedule&) const = default;
};

/// offsets[s][hop][slot] are absolute ns within the stream's horizon.
Schedule schedule_from_offsets(const Scenario& sc, const std::vector<std::vector<std::vector<Nanos>>>& offsets);

} // namespace ttubs
