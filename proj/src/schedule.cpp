#include "ttubs/schedule.hpp"

#include <algorithm>

namespace ttubs {

std::string_view to_string(Mode m)
{
    return m == Mode::WA ? "wa" : "nfic";
}

Mode parse_mode(std::string_view s)
{
    if (s == "wa" || s == "WA" || s == "fic" || s == "FIC") {
        return Mode::WA;
    }
    if (s == "nfic" || s == "NFIC") {
        return Mode::NFIC;
    }
    throw InvalidInput("unknown mode '" + std::string(s) + "' (expected wa|nfic)");
}

int nfic_queue(const Link& link)
{
    return std::min(kTtQueue, std::max(0, link.queue_count - 1));
}

Schedule Schedule::empty_for(const Scenario& sc)
{
    const auto horizons = stream_horizons(sc);
    Schedule out;
    out.offsets.resize(sc.streams.size());
    out.queues.resize(sc.streams.size());
    for (StreamIndex s = 0; s < sc.streams.size(); ++s) {
        const auto& st = sc.streams[s];
        const auto slots = static_cast<std::size_t>(horizons[s] / st.period);
        out.offsets[s].assign(st.route.size(), std::vector<std::optional<Nanos>>(slots));
        for (LinkIndex l : st.route) {
            out.queues[s].push_back(nfic_queue(sc.links.at(l)));
        }
    }
    return out;
}

std::optional<Nanos> Schedule::offset(StreamIndex s, std::size_t hop, std::int64_t slot) const
{
    if (s >= offsets.size() || hop >= offsets[s].size() || slot < 0 ||
        static_cast<std::size_t>(slot) >= offsets[s][hop].size()) {
        return std::nullopt;
    }
    return offsets[s][hop][static_cast<std::size_t>(slot)];
}

Nanos Schedule::at(StreamIndex s, std::size_t hop, std::int64_t slot) const
{
    auto v = offset(s, hop, slot);
    if (!v) {
        throw InvalidInput("schedule: no offset for stream #" + std::to_string(s) + " hop " + std::to_string(hop) +
                           " slot " + std::to_string(slot));
    }
    return *v;
}

bool Schedule::complete() const
{
    for (const auto& hops : offsets) {
        for (const auto& slots : hops) {
            if (std::any_of(slots.begin(), slots.end(), [](const auto& v) { return !v.has_value(); })) {
                return false;
            }
        }
    }
    return true;
}

Schedule schedule_from_offsets(const Scenario& sc, const std::vector<std::vector<std::vector<Nanos>>>& offsets)
{
    Schedule out = Schedule::empty_for(sc);
    if (offsets.size() != sc.streams.size()) {
        throw InvalidInput("schedule_from_offsets: stream count mismatch");
    }
    for (StreamIndex s = 0; s < offsets.size(); ++s) {
        if (offsets[s].size() != out.offsets[s].size()) {
            throw InvalidInput("schedule_from_offsets: hop count mismatch for " + sc.streams[s].id);
        }
        for (std::size_t h = 0; h < offsets[s].size(); ++h) {
            if (offsets[s][h].size() != out.offsets[s][h].size()) {
                throw InvalidInput("schedule_from_offsets: slot count mismatch for " + sc.streams[s].id);
            }
            for (std::size_t k = 0; k < offsets[s][h].size(); ++k) {
                out.offsets[s][h][k] = offsets[s][h][k];
            }
        }
    }
    return out;
}

} // namespace ttubs
