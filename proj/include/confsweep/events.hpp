#pragma once

#include <string>
#include <vector>

#include "confsweep/config.hpp"
#include "confsweep/partitions.hpp"

namespace confsweep {

// One step of the sweep. Working-line ids are 0..n-k-1 in base-line order.
struct Event {
    enum class Kind { Init, Work, Frame, Close };
    Kind kind = Kind::Init;

    // Init: the base-line segment distribution.
    SegmentTuple lambda;

    // Work: the k lines meeting at the new crossing (in pre-event sweep-line
    // order) and the kernel lines sent to each side (in pre-event order).
    std::vector<int> chosen, left, right;

    // Frame: the k-1 crossings on the swept frame line, left to right, plus
    // the lines crossing it plainly in each of the k gaps (pre-event order).
    std::vector<std::vector<int>> groups, gaps;

    // Close: plain crossings added to each working line in the last region.
    std::vector<int> closure_counts;

    bool operator==(const Event&) const = default;
};

std::string events_to_json(const std::vector<Event>& history);
std::vector<Event> events_from_json(const std::string& json_array);

// A sweep emission: the assembled configuration plus the event history that
// produced it.
struct RawRecord {
    Configuration config;
    std::vector<Event> history;
};

// Serializes {"n":..,"k":..,"lines":[..],"history":[..]}.
std::string serialize_raw(const RawRecord& rec);
// Parses a raw record; history may be absent (empty result vector).
std::optional<RawRecord> parse_raw(const std::string& line, std::string* err = nullptr);

}  // namespace confsweep
