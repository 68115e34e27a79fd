#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ttubs {

/// All times are integer nanoseconds.
using Nanos = std::int64_t;

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;
using StreamIndex = std::size_t;

constexpr Nanos kNsPerUs = 1'000;
constexpr Nanos kNsPerMs = 1'000'000;

/// Bytes added to every payload for header, FCS and tag.
constexpr std::int64_t kFrameOverheadBytes = 22;
constexpr std::int64_t kMaxPayloadBytes = 1500;
constexpr int kGateCount = 8;

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class NodeKind { EndStation, Switch };

struct Node {
    std::string id;
    NodeKind kind = NodeKind::EndStation;
};

struct Link {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    std::int64_t rate_bps = 1'000'000'000;
    Nanos prop_delay = 0;
    Nanos proc_delay = 0;
    int queue_count = 8;
};

struct Stream {
    std::string id;
    Nanos period = 0;
    std::int64_t payload_min = 0;
    std::int64_t payload_max = 0;
    int queue = 4;
    Nanos e2e_deadline = 0;
    Nanos jitter_req = 0;
    std::vector<LinkIndex> route;
    int priority = 0;
};

struct Scenario {
    std::string name;
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<Stream> streams;
    Nanos sync_precision = 0;
    /// Fix every talker's first-hop offset to the start of its slot.
    bool pin_talker_offsets = false;

    [[nodiscard]] std::optional<NodeIndex> find_node(std::string_view id) const;
    [[nodiscard]] std::optional<LinkIndex> find_link(NodeIndex src, NodeIndex dst) const;
    [[nodiscard]] std::optional<LinkIndex> find_link(std::string_view src, std::string_view dst) const;
    [[nodiscard]] std::optional<StreamIndex> find_stream(std::string_view id) const;
    [[nodiscard]] NodeIndex talker(StreamIndex s) const;
    [[nodiscard]] NodeIndex listener(StreamIndex s) const;
    /// "SRC->DST"
    [[nodiscard]] std::string link_name(LinkIndex l) const;
    [[nodiscard]] bool is_switch(NodeIndex n) const { return nodes.at(n).kind == NodeKind::Switch; }
    /// Streams whose route contains `l`, in stream-index order.
    [[nodiscard]] std::vector<StreamIndex> streams_on_link(LinkIndex l) const;
    /// Position of `l` in the stream's route, if present.
    [[nodiscard]] std::optional<std::size_t> hop_of(StreamIndex s, LinkIndex l) const;

    StreamIndex add_stream_by_path(Stream stream, std::span<const std::string> node_path);
};

/// Least common multiple of all periods.
Nanos hyper_period(std::span<const Nanos> periods);

/// Wire time of a frame carrying `payload` bytes, rounded up to whole nanoseconds.
Nanos bytes_to_duration(std::int64_t payload, std::int64_t rate_bps);

/// Transmission time of the largest frame of `s` on link `l`.
Nanos frame_duration(const Scenario& sc, StreamIndex s, LinkIndex l);

/// Hyper-period over which every stream is expanded. Streams that share a link
/// (directly or through a chain of shared links) get the same horizon, so per-slot
/// constraints line up on every link of a route.
std::vector<Nanos> stream_horizons(const Scenario& sc);

/// Cycle of link `l`: the common horizon of the streams it carries, 0 if none.
Nanos link_cycle(const Scenario& sc, LinkIndex l);
Nanos link_cycle(const Scenario& sc, std::span<const Nanos> horizons, LinkIndex l);

struct FrameInstance {
    StreamIndex stream = 0;
    LinkIndex link = 0;
    std::size_t hop = 0;
    std::int64_t slot = 0;
    Nanos duration = 0;
};

/// Streams in index order, route hops in order, slots ascending.
std::vector<FrameInstance> expand_frame_instances(const Scenario& sc);

struct Defect {
    std::string where;
    std::string message;
};

std::vector<Defect> validate_scenario(const Scenario& sc);

/// Throws InvalidInput listing every defect.
void require_valid(const Scenario& sc);

} // namespace ttubs
